#include "xfode/state_repr.hpp"

#include "xfode/error.hpp"

#include <algorithm>
#include <cctype>

namespace xfode {

std::string to_string(StateMode mode) { return mode == StateMode::Lagged ? "SR1" : "SR2"; }

StateMode parse_state_mode(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "sr1" || t == "lagged") return StateMode::Lagged;
  if (t == "2" || t == "sr2" || t == "incremental") return StateMode::Incremental;
  throw Error(ErrorCode::InvalidConfig, "unknown state representation '" + text + "'");
}

StateSequence build_states(const Eigen::MatrixXd& outputs, const StateConfig& cfg) {
  const Eigen::Index samples = outputs.rows();
  const Eigen::Index n_y = outputs.cols();
  const int m = cfg.order;
  if (m < 0) throw Error(ErrorCode::InvalidConfig, "state order must be non-negative");
  if (samples <= m) {
    throw Error(ErrorCode::InsufficientSamples,
                std::to_string(samples) + " samples cannot form a state of order " + std::to_string(m));
  }

  const Eigen::Index valid = samples - m;
  StateSequence seq;
  seq.offset = static_cast<std::size_t>(m);
  seq.states.resize(valid, (m + 1) * n_y);

  if (cfg.mode == StateMode::Lagged) {
    for (int j = 0; j <= m; ++j) {
      seq.states.middleCols(j * n_y, n_y) = outputs.middleRows(m - j, valid);
    }
    return seq;
  }

  // diff holds d^j y over every index where it is defined; row r is sample r + j.
  Eigen::MatrixXd diff = outputs;
  seq.states.leftCols(n_y) = outputs.bottomRows(valid);
  for (int j = 1; j <= m; ++j) {
    const Eigen::Index rows = diff.rows() - 1;
    Eigen::MatrixXd next = diff.bottomRows(rows) - diff.topRows(rows);
    diff = std::move(next);
    seq.states.middleCols(j * n_y, n_y) = diff.bottomRows(valid);
  }
  return seq;
}

Eigen::VectorXd output_of_state(const Eigen::VectorXd& x, int n_y) {
  if (n_y <= 0 || x.size() < n_y || x.size() % n_y != 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "state of length " + std::to_string(x.size()) + " is not a stack of " + std::to_string(n_y) +
                    "-wide output blocks");
  }
  return x.head(n_y);
}

Eigen::VectorXd combined_input(const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  Eigen::VectorXd z(x.size() + u.size());
  z << x, u;
  return z;
}

TrajectorySet build_trajectories(const RawDataset& ds, const StateConfig& cfg, int horizon, int stride) {
  if (horizon < 1) throw Error(ErrorCode::InvalidConfig, "rollout horizon must be at least 1");
  if (stride < 1) throw Error(ErrorCode::InvalidConfig, "stride must be at least 1");
  const auto needed = static_cast<std::size_t>(cfg.order + horizon + 1);
  if (ds.sample_count() < needed) {
    throw Error(ErrorCode::InsufficientSamples, std::to_string(ds.sample_count()) + " samples, need at least " +
                                                    std::to_string(needed));
  }

  const auto seq = build_states(ds.outputs, cfg);
  const Eigen::Index valid = seq.states.rows();
  const Eigen::Index span = horizon + 1;

  TrajectorySet set;
  set.horizon = horizon;
  for (Eigen::Index s = 0; s + span <= valid; s += stride) {
    Trajectory t;
    t.start = seq.offset + static_cast<std::size_t>(s);
    t.states = seq.states.middleRows(s, span);
    t.inputs = ds.inputs.middleRows(static_cast<Eigen::Index>(t.start), span);
    set.trajectories.push_back(std::move(t));
  }
  return set;
}

}  // namespace xfode
