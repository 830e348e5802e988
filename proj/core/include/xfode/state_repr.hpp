#pragma once

#include "xfode/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace xfode {

/// Lagged stacks past outputs [y_k, y_{k-1}, ..., y_{k-m}];
/// Incremental stacks differences [y_k, dy_k, ..., d^m y_k].
enum class StateMode { Lagged, Incremental };

struct StateConfig {
  StateMode mode = StateMode::Incremental;
  int order = 0;  // m: number of lags or difference orders

  int state_dim(int n_y) const { return (order + 1) * n_y; }
};

std::string to_string(StateMode mode);
/// Accepts "1"/"sr1"/"lagged" and "2"/"sr2"/"incremental".
StateMode parse_state_mode(const std::string& text);

struct StateSequence {
  Eigen::MatrixXd states;  // (K - m) x n_x
  std::size_t offset = 0;  // original index of states.row(0)
};

StateSequence build_states(const Eigen::MatrixXd& outputs, const StateConfig& cfg);

/// The current-output block: first n_y state components under either mode.
Eigen::VectorXd output_of_state(const Eigen::VectorXd& x, int n_y);

/// z = [x; u].
Eigen::VectorXd combined_input(const Eigen::VectorXd& x, const Eigen::VectorXd& u);

struct Trajectory {
  Eigen::MatrixXd inputs;  // (N+1) x n_u
  Eigen::MatrixXd states;  // (N+1) x n_x
  std::size_t start = 0;   // original sample index of row 0
};

struct TrajectorySet {
  std::vector<Trajectory> trajectories;
  int horizon = 0;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
};

/// Windows of N+1 consecutive states starting every `stride` valid states.
TrajectorySet build_trajectories(const RawDataset& ds, const StateConfig& cfg, int horizon, int stride = 1);

}  // namespace xfode
