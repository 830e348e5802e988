#include "xfode/membership.hpp"

#include "xfode/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace xfode {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double chain_spacing(Strategy s) { return s == Strategy::PS1 ? 1.0 : 4.0; }

void check_index(const DecodedMFs& mfs, int p) {
  if (p < 0 || p >= mfs.rules) {
    throw Error(ErrorCode::IndexOutOfRange,
                "rule " + std::to_string(p) + " of " + std::to_string(mfs.rules));
  }
}

GradeJet gauss2_jet(const DecodedMFs& mfs, int q, double z) {
  GradeJet j;
  j.source = q;
  const double c = mfs.centers[q];
  const bool left = z <= c;
  const double sigma = left ? mfs.left_spreads[q] : mfs.right_spreads[q];
  const double u = (z - c) / sigma;
  j.value = std::exp(-0.5 * u * u);
  j.d_z = -u / sigma * j.value;
  j.d_center = -j.d_z;
  (left ? j.d_left : j.d_right) = u * u / sigma * j.value;
  return j;
}

GradeJet gauss_jet(const DecodedMFs& mfs, int p, double z) {
  GradeJet j;
  j.source = p;
  const double sigma = mfs.left_spreads[p];
  const double u = (z - mfs.centers[p]) / sigma;
  j.value = std::exp(-0.5 * u * u);
  j.d_z = -u / sigma * j.value;
  j.d_center = -j.d_z;
  j.d_left = u * u / sigma * j.value;
  return j;
}

GradeJet triangle_jet(const DecodedMFs& mfs, int p, double z) {
  GradeJet j;
  j.source = p;
  const auto tri = mfs.triangle(p);
  const int last = mfs.rules - 1;
  // Outer sets are shouldered so the partition never goes empty.
  if ((p == 0 && z < tri.center) || (p == last && z > tri.center)) {
    j.value = 1.0;
    return j;
  }
  if (z < tri.center) {
    if (z <= tri.left) return j;
    const double width = mfs.left_spreads[p];
    j.value = (z - tri.left) / (tri.center - tri.left);
    j.d_z = 1.0 / width;
    j.d_center = -1.0 / width;
    j.d_left = (tri.center - z) / (width * width);
    return j;
  }
  // z >= center: right branch (also the right-hand derivative at the peak).
  if (z >= tri.right) return j;
  const double width = mfs.right_spreads[p];
  j.value = (tri.right - z) / (tri.right - tri.center);
  j.d_z = -1.0 / width;
  j.d_center = 1.0 / width;
  j.d_right = (z - tri.center) / (width * width);
  return j;
}

GradeJet complement_of(const DecodedMFs& mfs, int q, double z) {
  GradeJet j = gauss2_jet(mfs, q, z);
  j.value = 1.0 - j.value;
  j.d_z = -j.d_z;
  j.d_center = -j.d_center;
  j.d_left = -j.d_left;
  j.d_right = -j.d_right;
  return j;
}

GradeJet ps3_jet(const DecodedMFs& mfs, int p, double z) {
  const int last = mfs.rules - 1;
  if (p % 2 == 1) {
    // Gauss2 set restricted to the segments where it belongs to the active pair.
    const double lo = (p - 1 == 0) ? -kInf : mfs.anchor(p - 1);
    const double hi = (p + 1 < last) ? mfs.anchor(p + 1) : kInf;
    if (z < lo || z >= hi) {
      GradeJet j;
      j.source = p;
      return j;
    }
    return gauss2_jet(mfs, p, z);
  }
  GradeJet zero;
  zero.source = p;
  if (p == 0) {
    return z < mfs.centers[1] ? complement_of(mfs, 1, z) : zero;
  }
  if (p == last) {
    return z > mfs.centers[last - 1] ? complement_of(mfs, last - 1, z) : zero;
  }
  const double mid = mfs.anchor(p);
  if (z >= mfs.centers[p - 1] && z < mid) return complement_of(mfs, p - 1, z);
  if (z >= mid && z <= mfs.centers[p + 1]) return complement_of(mfs, p + 1, z);
  return zero;
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::FreeGauss: return "FreeGauss";
    case Strategy::PS1: return "PS1";
    case Strategy::PS2: return "PS2";
    case Strategy::PS3: return "PS3";
  }
  return "?";
}

Strategy parse_strategy(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "ps1") return Strategy::PS1;
  if (t == "2" || t == "ps2") return Strategy::PS2;
  if (t == "3" || t == "ps3") return Strategy::PS3;
  if (t == "0" || t == "free" || t == "gauss" || t == "freegauss" || t == "none") return Strategy::FreeGauss;
  throw Error(ErrorCode::InvalidConfig, "unknown partitioning strategy '" + text + "'");
}

double softplus(double raw) {
  return raw > 0.0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
}

double softplus_inverse(double v) {
  if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveInput, "softplus_inverse needs v > 0");
  // log(e^v - 1) = v + log(1 - e^-v)
  return v + std::log(-std::expm1(-v));
}

double softplus_derivative(double raw) {
  if (raw >= 0.0) return 1.0 / (1.0 + std::exp(-raw));
  const double e = std::exp(raw);
  return e / (1.0 + e);
}

std::size_t AntecedentChain::raw_size(Strategy strategy, int rules) {
  const auto p = static_cast<std::size_t>(rules);
  return strategy == Strategy::FreeGauss ? 2 * p : p + 2;
}

MfShape DecodedMFs::shape(int p) const {
  switch (strategy) {
    case Strategy::PS1: return MfShape::Triangle;
    case Strategy::PS2: return MfShape::Gauss2;
    case Strategy::PS3: return p % 2 == 1 ? MfShape::Gauss2 : MfShape::Complement;
    case Strategy::FreeGauss: return MfShape::Gauss;
  }
  return MfShape::Gauss;
}

TriangleMF DecodedMFs::triangle(int p) const {
  const int last = rules - 1;
  // Adjacent triangles share edges exactly: r_p = c_{p+1}, l_{p+1} = c_p.
  const double left = p > 0 ? centers[p - 1] : centers[0] - left_spreads[0];
  const double right = p < last ? centers[p + 1] : centers[last] + right_spreads[last];
  return {left, centers[p], right};
}

Gauss2MF DecodedMFs::gauss2(int p) const { return {centers[p], left_spreads[p], right_spreads[p]}; }

double DecodedMFs::anchor(int p) const {
  if (strategy == Strategy::PS3 && p % 2 == 0 && p > 0 && p < rules - 1) {
    return 0.5 * (centers[p - 1] + centers[p + 1]);
  }
  return centers[p];
}

DecodedMFs decode(const AntecedentChain& chain) {
  if (chain.rules < 2) throw Error(ErrorCode::InvalidConfig, "a chain needs at least 2 rules");
  if (chain.raw.size() != AntecedentChain::raw_size(chain.strategy, chain.rules)) {
    throw Error(ErrorCode::DimensionMismatch, "chain has " + std::to_string(chain.raw.size()) +
                                                  " raw parameters, expected " +
                                                  std::to_string(AntecedentChain::raw_size(chain.strategy, chain.rules)));
  }
  for (std::size_t i = 0; i < chain.raw.size(); ++i) {
    if (!std::isfinite(chain.raw[i])) {
      throw Error(ErrorCode::NonFiniteParameter, "raw chain parameter " + std::to_string(i));
    }
  }

  const int P = chain.rules;
  DecodedMFs mfs;
  mfs.strategy = chain.strategy;
  mfs.rules = P;
  mfs.centers.resize(P);
  mfs.left_spreads.resize(P);
  mfs.right_spreads.resize(P);

  if (chain.strategy == Strategy::FreeGauss) {
    for (int p = 0; p < P; ++p) {
      mfs.centers[p] = chain.raw[p];
      mfs.left_spreads[p] = mfs.right_spreads[p] = softplus(chain.raw[P + p]);
    }
    return mfs;
  }

  const double spacing = chain_spacing(chain.strategy);
  mfs.centers[0] = chain.raw[0];
  mfs.left_spreads[0] = softplus(chain.raw[1]);
  for (int p = 0; p < P; ++p) {
    mfs.right_spreads[p] = softplus(chain.raw[2 + p]);
    if (p + 1 < P) {
      mfs.centers[p + 1] = mfs.centers[p] + spacing * mfs.right_spreads[p];
      mfs.left_spreads[p + 1] = mfs.right_spreads[p];
    }
  }
  return mfs;
}

GradeJet evaluate_with_grad(const DecodedMFs& mfs, int p, double z) {
  check_index(mfs, p);
  switch (mfs.strategy) {
    case Strategy::PS1: return triangle_jet(mfs, p, z);
    case Strategy::PS2: return gauss2_jet(mfs, p, z);
    case Strategy::PS3: return ps3_jet(mfs, p, z);
    case Strategy::FreeGauss: return gauss_jet(mfs, p, z);
  }
  return {};
}

double evaluate(const DecodedMFs& mfs, int p, double z) { return evaluate_with_grad(mfs, p, z).value; }

void evaluate_all(const DecodedMFs& mfs, double z, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(mfs.rules)) {
    throw Error(ErrorCode::DimensionMismatch, "output span does not match rule count");
  }
  for (int p = 0; p < mfs.rules; ++p) out[p] = evaluate_with_grad(mfs, p, z).value;
}

void decode_backward(const AntecedentChain& chain, std::span<const double> d_centers,
                     std::span<const double> d_left, std::span<const double> d_right,
                     std::span<double> raw_grad) {
  const int P = chain.rules;
  if (chain.strategy == Strategy::FreeGauss) {
    for (int p = 0; p < P; ++p) {
      raw_grad[p] += d_centers[p];
      raw_grad[P + p] += softplus_derivative(chain.raw[P + p]) * (d_left[p] + d_right[p]);
    }
    return;
  }

  const double spacing = chain_spacing(chain.strategy);
  double downstream_centers = 0.0;  // sum of d_centers over indices > p
  for (int p = P - 1; p >= 0; --p) {
    double d_spread = d_right[p] + spacing * downstream_centers;
    if (p + 1 < P) d_spread += d_left[p + 1];
    raw_grad[2 + p] += softplus_derivative(chain.raw[2 + p]) * d_spread;
    downstream_centers += d_centers[p];
  }
  raw_grad[0] += downstream_centers;
  raw_grad[1] += softplus_derivative(chain.raw[1]) * d_left[0];
}

AntecedentChain init_chain(Strategy strategy, int rules, double domain_min, double domain_max) {
  if (rules < 2) throw Error(ErrorCode::InvalidConfig, "a chain needs at least 2 rules");
  double lo = domain_min;
  double hi = domain_max;
  if (!(hi > lo)) {
    // Degenerate domain: widen around the given values.
    lo = std::min(domain_min, domain_max) - 0.5;
    hi = std::max(domain_min, domain_max) + 0.5;
  }
  const double gaps = static_cast<double>(rules - 1);

  AntecedentChain chain;
  chain.strategy = strategy;
  chain.rules = rules;
  chain.raw.resize(AntecedentChain::raw_size(strategy, rules));

  if (strategy == Strategy::FreeGauss) {
    const double sigma = softplus_inverse((hi - lo) / (2.0 * gaps));
    for (int p = 0; p < rules; ++p) {
      chain.raw[p] = p + 1 == rules ? hi : lo + (hi - lo) * p / gaps;
      chain.raw[rules + p] = sigma;
    }
    return chain;
  }

  const double spread = (hi - lo) / (chain_spacing(strategy) * gaps);
  const double raw_spread = softplus_inverse(spread);
  chain.raw[0] = lo;
  std::fill(chain.raw.begin() + 1, chain.raw.end(), raw_spread);
  return chain;
}

ActivePair active_pair(const DecodedMFs& mfs, double z) {
  const int last = mfs.rules - 1;
  if (z < mfs.anchor(0)) return {0, true};
  if (z > mfs.anchor(last)) return {last - 1, true};
  // Largest p <= last - 1 with anchor(p) <= z; ties go to the right segment.
  int p = 0;
  while (p + 1 < last && mfs.anchor(p + 1) <= z) ++p;
  return {p, false};
}

std::vector<double> export_grid(const DecodedMFs& mfs, int points) {
  const auto [lo_it, hi_it] = std::minmax_element(mfs.centers.begin(), mfs.centers.end());
  double lo = *lo_it;
  double hi = *hi_it;
  const double span = (hi - lo) / 10.0;
  lo -= span;
  hi += span;
  std::vector<double> grid(static_cast<std::size_t>(std::max(points, 2)));
  const double n = static_cast<double>(grid.size() - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = i + 1 == grid.size() ? hi : lo + (hi - lo) * static_cast<double>(i) / n;
  }
  return grid;
}

void write_mf_csv(const DecodedMFs& mfs, const std::filesystem::path& path, int points) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "z";
  for (int p = 0; p < mfs.rules; ++p) out << ",mu_" << (p + 1);
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  std::vector<double> grades(static_cast<std::size_t>(mfs.rules));
  for (const double z : export_grid(mfs, points)) {
    evaluate_all(mfs, z, grades);
    out << z;
    for (const double g : grades) out << ',' << g;
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed while writing " + path.string());
}

}  // namespace xfode
