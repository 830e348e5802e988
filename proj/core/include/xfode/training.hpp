#pragma once

#include "xfode/model.hpp"
#include "xfode/state_repr.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace xfode {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct EpochReport {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  int skipped_batches = 0;
};

struct TrainConfig {
  int epochs = 500;
  int mini_batch_size = 32;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
  AdamSettings adam;
  std::optional<double> gradient_clip = 10.0;  // global L2 norm
  std::function<void(const EpochReport&)> on_epoch;
};

struct TrainRun {
  std::vector<double> best_params;
  double best_loss = 0.0;
  int best_epoch = 0;
  std::vector<double> loss_trace;  // per-epoch mean mini-batch L1
  std::vector<int> skipped_per_epoch;
  int skipped_batches = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// (1/B) sum_j sum_{k=1..N} |x_k - xhat_k|_1. Each prediction is an
/// (N+1) x n_x matrix aligned with the target trajectory's states; row 0 is
/// not scored.
double l1_loss(std::span<const Eigen::MatrixXd> predictions, const TrajectorySet& targets);

/// Rollouts of every trajectory from its first state.
std::vector<Eigen::MatrixXd> predict(const Model& model, const TrajectorySet& set);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // aligned with Model::parameters()
};

/// Exact reverse-mode gradient of the batch L1 loss through the full
/// rollout. Uses sign(0) = 0. Throws NumericalDivergence.
LossGradient compute_gradient(const Model& model, const TrajectorySet& batch);

/// Same, over the subset `indices` of `set` (B = indices.size()).
LossGradient compute_gradient(const Model& model, const TrajectorySet& set, std::span<const std::size_t> indices);

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, double learning_rate, AdamSettings settings = {});

  void step(std::span<double> params, std::span<const double> gradient);
  long steps() const { return t_; }

 private:
  double lr_;
  AdamSettings s_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

/// Mini-batched Adam over shuffled trajectories. Mini-batches whose rollout
/// diverges are skipped and counted. On return the model holds the
/// parameters with the lowest epoch loss. Deterministic given the config.
TrainRun train(Model& model, const TrajectorySet& set, const TrainConfig& cfg);

}  // namespace xfode
