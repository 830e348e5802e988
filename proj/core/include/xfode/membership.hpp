#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xfode {

/// Antecedent families. FreeGauss is the unpartitioned baseline; PS1-PS3 are
/// the coupled partitions that keep at most two consecutive rules active.
enum class Strategy { FreeGauss, PS1, PS2, PS3 };

std::string to_string(Strategy s);
/// Accepts "free"/"gauss"/"none"/"0", "1"/"ps1", "2"/"ps2", "3"/"ps3".
Strategy parse_strategy(const std::string& text);

/// log(1 + e^raw), overflow-free for large |raw|.
double softplus(double raw);
/// Inverse of softplus; throws NonPositiveInput for v <= 0.
double softplus_inverse(double v);
/// d softplus / d raw, i.e. the logistic sigmoid.
double softplus_derivative(double raw);

/// Unconstrained parameter vector of one input dimension's MF family.
///
/// Layouts (P = rules):
///   PS1:       [c_1, D'_1^l, D'^r_1 .. D'^r_P]        P + 2 values
///   PS2, PS3:  [c_1, s'_1^l, s'^r_1 .. s'^r_P]        P + 2 values
///   FreeGauss: [c_1 .. c_P, s'_1 .. s'_P]             2P values
/// Primed entries are spreads before softplus.
struct AntecedentChain {
  Strategy strategy = Strategy::PS1;
  int rules = 0;
  std::vector<double> raw;

  static std::size_t raw_size(Strategy strategy, int rules);
};

struct TriangleMF {
  double left;
  double center;
  double right;
};

struct Gauss2MF {
  double center;
  double sigma_left;
  double sigma_right;
};

enum class MfShape { Triangle, Gauss2, Gauss, Complement };

/// Concrete MF parameters decoded from a chain. Indices are zero-based.
///
/// For PS1 the spreads are the triangle half-widths, for PS2/PS3 the
/// Gauss2 standard deviations, for FreeGauss left == right == sigma.
/// Under PS3, odd zero-based indices are Gauss2 sets and even indices are
/// complements of their Gauss2 neighbours.
struct DecodedMFs {
  Strategy strategy = Strategy::PS1;
  int rules = 0;
  std::vector<double> centers;
  std::vector<double> left_spreads;
  std::vector<double> right_spreads;

  MfShape shape(int p) const;
  TriangleMF triangle(int p) const;
  Gauss2MF gauss2(int p) const;

  /// Left edge of the segment on which rules (p, p+1) are the active pair.
  /// Equals the center except for interior PS3 complements, whose edge is the
  /// midpoint between the neighbouring Gauss2 centers.
  double anchor(int p) const;
};

DecodedMFs decode(const AntecedentChain& chain);

/// Membership grade of rule p (zero-based) at z, in [0, 1].
double evaluate(const DecodedMFs& mfs, int p, double z);

/// All P grades at z written to `out`.
void evaluate_all(const DecodedMFs& mfs, double z, std::span<double> out);

/// Grade plus partial derivatives. Every MF depends on the decoded
/// (center, left spread, right spread) of exactly one source MF: itself, or
/// for a PS3 complement the Gauss2 neighbour it complements.
struct GradeJet {
  double value = 0.0;
  double d_z = 0.0;
  int source = 0;
  double d_center = 0.0;
  double d_left = 0.0;
  double d_right = 0.0;
};

GradeJet evaluate_with_grad(const DecodedMFs& mfs, int p, double z);

/// Chain rule from decoded-parameter gradients to raw-chain gradients.
/// Inputs are indexed by MF; output is accumulated into `raw_grad`.
void decode_backward(const AntecedentChain& chain, std::span<const double> d_centers,
                     std::span<const double> d_left, std::span<const double> d_right,
                     std::span<double> raw_grad);

/// Uniformly spaced initial chain covering [domain_min, domain_max].
AntecedentChain init_chain(Strategy strategy, int rules, double domain_min, double domain_max);

struct ActivePair {
  int first = 0;         // rules (first, first + 1) are the active pair
  bool clamped = false;  // z lies outside the partition
};

ActivePair active_pair(const DecodedMFs& mfs, double z);

/// Uniform grid used for MF export: [lo - span, hi + span] with
/// span = (hi - lo) / 10 where lo, hi are the extreme centers.
std::vector<double> export_grid(const DecodedMFs& mfs, int points = 501);

/// CSV with columns z, mu_1 .. mu_P, one row per grid point.
void write_mf_csv(const DecodedMFs& mfs, const std::filesystem::path& path, int points = 501);

}  // namespace xfode
