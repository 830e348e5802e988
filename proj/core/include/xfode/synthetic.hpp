#pragma once

#include "xfode/dataset.hpp"
#include "xfode/model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>

namespace xfode {

/// Stand-in benchmark records.
///   TankLike:         y+ = y - a sqrt(max(y, 0)) + b u, single drained tank
///   DamperLike:       mass-spring with velocity-dependent damping, y = position
///   FuzzyGroundTruth: free run of a random PS1 additive model with x = y
enum class SyntheticKind { TankLike, DamperLike, FuzzyGroundTruth };

std::string to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(const std::string& text);

/// Deterministic in `seed`; requires n_samples >= 100.
RawDataset generate_synthetic(SyntheticKind kind, std::size_t n_samples, std::uint64_t seed);

/// Seeded multilevel pseudo-random binary sequence: piecewise-constant levels
/// drawn uniformly in [lo, hi], each held for a random number of samples in
/// [min_hold, max_hold].
Eigen::VectorXd multilevel_prbs(std::size_t n_samples, double lo, double hi, int min_hold, int max_hold,
                                std::uint64_t seed);

/// Tank recursion for an explicit input sequence (exposed for tests).
Eigen::VectorXd tank_response(const Eigen::VectorXd& u, double y0);

struct FuzzyGroundTruth {
  Model model;  // raw-unit dynamics, m = 0 so the state is the output
  RawDataset data;
};

/// The generating model for FuzzyGroundTruth together with its record.
FuzzyGroundTruth fuzzy_ground_truth(std::size_t n_samples, std::uint64_t seed);

}  // namespace xfode
