#include "xfode/training.hpp"

#include "xfode/error.hpp"
#include "xfode/rollout.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace xfode {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double l1_loss(std::span<const Eigen::MatrixXd> predictions, const TrajectorySet& targets) {
  if (predictions.size() != targets.size() || targets.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and target trajectory counts differ");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& target = targets.trajectories[j].states;
    const auto& pred = predictions[j];
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "trajectory " + std::to_string(j) + " has mismatched shape");
    }
    total += (target.bottomRows(target.rows() - 1) - pred.bottomRows(pred.rows() - 1)).cwiseAbs().sum();
  }
  return total / static_cast<double>(targets.size());
}

std::vector<Eigen::MatrixXd> predict(const Model& model, const TrajectorySet& set) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(set.size());
  for (const auto& t : set.trajectories) {
    out.push_back(rollout(model, t.states.row(0).transpose(), t.inputs.topRows(set.horizon)).states);
  }
  return out;
}

LossGradient compute_gradient(const Model& model, const TrajectorySet& set, std::span<const std::size_t> indices) {
  if (indices.empty()) throw Error(ErrorCode::ShapeMismatch, "empty batch");
  const int n_x = model.n_x();
  const int n_u = model.spec().n_u;
  const int horizon = set.horizon;
  const double scale = 1.0 / static_cast<double>(indices.size());

  LossGradient out;
  out.gradient.assign(model.parameter_count(), 0.0);

  Eigen::VectorXd z(n_x + n_u);
  Eigen::VectorXd adjoint(n_x);
  Eigen::VectorXd dz(n_x + n_u);

  for (const std::size_t j : indices) {
    const auto& traj = set.trajectories.at(j);
    const auto run = rollout(model, traj.states.row(0).transpose(), traj.inputs.topRows(horizon));
    const auto& pred = run.states;

    adjoint.setZero();
    for (int k = horizon; k >= 1; --k) {
      for (int o = 0; o < n_x; ++o) {
        const double residual = pred(k, o) - traj.states(k, o);
        out.loss += scale * std::abs(residual);
        adjoint(o) += scale * sign(residual);
      }
      // Step k-1 -> k: xhat_k = xhat_{k-1} + d([xhat_{k-1}; u_{k-1}]).
      z.head(n_x) = pred.row(k - 1).transpose();
      z.tail(n_u) = traj.inputs.row(k - 1).transpose();
      dz.setZero();
      model.backward(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
                     std::span<const double>(adjoint.data(), static_cast<std::size_t>(n_x)), out.gradient,
                     std::span<double>(dz.data(), static_cast<std::size_t>(dz.size())));
      adjoint += dz.head(n_x);
    }
  }
  return out;
}

LossGradient compute_gradient(const Model& model, const TrajectorySet& batch) {
  std::vector<std::size_t> all(batch.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return compute_gradient(model, batch, all);
}

AdamOptimizer::AdamOptimizer(std::size_t size, double learning_rate, AdamSettings settings)
    : lr_(learning_rate), s_(settings), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> gradient) {
  ++t_;
  const double c1 = 1.0 - std::pow(s_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(s_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = gradient[i];
    m_[i] = s_.beta1 * m_[i] + (1.0 - s_.beta1) * g;
    v_[i] = s_.beta2 * v_[i] + (1.0 - s_.beta2) * g * g;
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + s_.epsilon);
  }
}

TrainRun train(Model& model, const TrajectorySet& set, const TrainConfig& cfg) {
  if (set.empty()) throw Error(ErrorCode::InsufficientSamples, "no training trajectories");
  if (cfg.epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be at least 1");
  if (cfg.mini_batch_size < 1) throw Error(ErrorCode::InvalidConfig, "mini-batch size must be at least 1");
  if (!(cfg.learning_rate >= 0.0)) throw Error(ErrorCode::InvalidConfig, "learning rate must be non-negative");

  const auto start = std::chrono::steady_clock::now();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.mini_batch_size), set.size());

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<double> params = model.parameters();
  AdamOptimizer adam(params.size(), cfg.learning_rate, cfg.adam);

  TrainRun run;
  run.seed = cfg.seed;
  run.best_params = params;
  run.best_loss = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int used = 0;
    int skipped = 0;

    for (std::size_t first = 0; first < order.size(); first += batch) {
      const auto count = std::min(batch, order.size() - first);
      const std::span<const std::size_t> indices(order.data() + first, count);
      LossGradient lg;
      try {
        lg = compute_gradient(model, set, indices);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NumericalDivergence) throw;
        ++skipped;
        continue;
      }
      if (!std::isfinite(lg.loss)) {
        ++skipped;
        continue;
      }
      if (cfg.gradient_clip) {
        double norm = 0.0;
        for (const double g : lg.gradient) norm += g * g;
        norm = std::sqrt(norm);
        if (norm > *cfg.gradient_clip) {
          const double factor = *cfg.gradient_clip / norm;
          for (double& g : lg.gradient) g *= factor;
        }
      }
      adam.step(params, lg.gradient);
      model.set_parameters(params);
      loss_sum += lg.loss;
      ++used;
    }

    if (used == 0) {
      throw Error(ErrorCode::DivergedRun, "every mini-batch diverged in epoch " + std::to_string(epoch));
    }
    const double mean = loss_sum / used;
    run.loss_trace.push_back(mean);
    run.skipped_per_epoch.push_back(skipped);
    run.skipped_batches += skipped;
    if (mean < run.best_loss) {
      run.best_loss = mean;
      run.best_epoch = epoch;
      run.best_params = params;
    }
    if (cfg.on_epoch) cfg.on_epoch({epoch, mean, skipped});
  }

  model.set_parameters(run.best_params);
  model.metadata().seed = cfg.seed;
  model.metadata().epochs = cfg.epochs;
  model.metadata().final_loss = run.best_loss;
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace xfode
