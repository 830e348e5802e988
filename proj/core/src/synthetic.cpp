#include "xfode/synthetic.hpp"

#include "xfode/error.hpp"
#include "xfode/rollout.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

namespace xfode {
namespace {

constexpr double kTankDrain = 0.05;
constexpr double kTankInflow = 0.05;

RawDataset make_record(Eigen::VectorXd u, Eigen::VectorXd y, std::string name) {
  RawDataset ds;
  ds.inputs = std::move(u);
  ds.outputs = std::move(y);
  ds.name = std::move(name);
  ds.input_names = {"u1"};
  ds.output_names = {"y1"};
  return ds;
}

RawDataset damper_like(std::size_t n, std::uint64_t seed) {
  constexpr double dt = 0.1;
  constexpr double stiffness = 1.0;
  constexpr double linear_damping = 0.3;
  constexpr double quadratic_damping = 1.0;
  constexpr double gain = 1.0;
  const Eigen::VectorXd u = multilevel_prbs(n, -1.0, 1.0, 10, 50, seed);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  double pos = 0.0;
  double vel = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    y(k) = pos;
    const double damping = linear_damping + quadratic_damping * vel * vel;
    vel += dt * (-stiffness * pos - damping * vel + gain * u(k));
    pos += dt * vel;
  }
  return make_record(u, std::move(y), "damper_like");
}

}  // namespace

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::TankLike: return "tank_like";
    case SyntheticKind::DamperLike: return "damper_like";
    case SyntheticKind::FuzzyGroundTruth: return "fuzzy_ground_truth";
  }
  return "?";
}

SyntheticKind parse_synthetic_kind(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "tank_like") return SyntheticKind::TankLike;
  if (t == "damper_like") return SyntheticKind::DamperLike;
  if (t == "fuzzy_ground_truth") return SyntheticKind::FuzzyGroundTruth;
  throw Error(ErrorCode::InvalidConfig, "unknown synthetic kind '" + text + "'");
}

Eigen::VectorXd multilevel_prbs(std::size_t n_samples, double lo, double hi, int min_hold, int max_hold,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(lo, hi);
  std::uniform_int_distribution<int> hold(min_hold, max_hold);
  Eigen::VectorXd u(static_cast<Eigen::Index>(n_samples));
  Eigen::Index k = 0;
  while (k < u.size()) {
    const double value = level(rng);
    const Eigen::Index len = std::min<Eigen::Index>(hold(rng), u.size() - k);
    u.segment(k, len).setConstant(value);
    k += len;
  }
  return u;
}

Eigen::VectorXd tank_response(const Eigen::VectorXd& u, double y0) {
  Eigen::VectorXd y(u.size());
  double level = y0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    y(k) = level;
    level += -kTankDrain * std::sqrt(std::max(level, 0.0)) + kTankInflow * u(k);
  }
  return y;
}

FuzzyGroundTruth fuzzy_ground_truth(std::size_t n_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::uniform_real_distribution<double> state_slope(-0.3, -0.2);
  std::uniform_real_distribution<double> input_slope(0.05, 0.2);
  std::uniform_real_distribution<double> offset(-0.05, 0.05);

  ModelSpec spec;
  spec.kind = ModelKind::XFode;
  spec.strategy = Strategy::PS1;
  spec.rules = 5;
  spec.n_u = 1;
  spec.n_y = 1;
  spec.state = {StateMode::Lagged, 0};

  const std::pair<double, double> domains[] = {{-2.0, 2.0}, {-1.0, 1.0}};
  std::vector<SingleInputFls> blocks;
  for (int i = 0; i < 2; ++i) {
    auto chain = init_chain(Strategy::PS1, spec.rules, domains[i].first, domains[i].second);
    for (std::size_t r = 1; r < chain.raw.size(); ++r) chain.raw[r] += jitter(rng);
    std::vector<double> cons;
    for (int p = 0; p < spec.rules; ++p) {
      cons.push_back(i == 0 ? state_slope(rng) : input_slope(rng));
      cons.push_back(offset(rng));
    }
    blocks.emplace_back(std::move(chain), 1, std::move(cons));
  }
  Model model(spec, AdditiveDynamics(std::move(blocks), 1, 1));

  const Eigen::VectorXd u = multilevel_prbs(n_samples, -1.0, 1.0, 10, 60, seed ^ 0x9e3779b97f4a7c15ULL);
  const auto run = rollout(model, Eigen::VectorXd::Zero(1), u.head(u.size() - 1));
  return {std::move(model), make_record(u, run.states.col(0), "fuzzy_ground_truth")};
}

RawDataset generate_synthetic(SyntheticKind kind, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw Error(ErrorCode::InsufficientSamples, "synthetic records need at least 100 samples");
  switch (kind) {
    case SyntheticKind::TankLike: {
      const Eigen::VectorXd u = multilevel_prbs(n_samples, 0.2, 1.0, 20, 100, seed);
      return make_record(u, tank_response(u, 0.25), "tank_like");
    }
    case SyntheticKind::DamperLike: return damper_like(n_samples, seed);
    case SyntheticKind::FuzzyGroundTruth: return fuzzy_ground_truth(n_samples, seed).data;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown synthetic kind");
}

}  // namespace xfode
