#pragma once

#include "xfode/dataset.hpp"
#include "xfode/model.hpp"
#include "xfode/state_repr.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace xfode {

/// A rollout aborts once any state component exceeds this magnitude.
inline constexpr double kDivergenceLimit = 1e6;

struct RolloutResult {
  Eigen::MatrixXd states;  // (N+1) x n_x, row 0 is the initial state
  /// Optional per-step block contributions, each n_z x n_x (additive models).
  std::vector<Eigen::MatrixXd> contributions;
};

/// Forward Euler with unit step: x_{k+1} = x_k + d([x_k; u_k]) for
/// k = 0 .. N-1, where N = inputs.rows().
RolloutResult rollout(const Model& model, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs,
                      bool with_contributions = false);

struct Simulation {
  std::size_t offset = 0;     // original index of the first predicted sample (= m)
  Eigen::MatrixXd measured;   // (K - m) x n_y
  Eigen::MatrixXd predicted;  // (K - m) x n_y
  std::vector<Eigen::MatrixXd> contributions;
};

/// Free-run simulation over a (normalized) record: the initial state comes
/// from the first m+1 measured outputs, afterwards only measured inputs are
/// used. Yields K - m predicted outputs.
Simulation simulate(const Model& model, const RawDataset& ds, bool with_contributions = false);

}  // namespace xfode
