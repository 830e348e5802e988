#pragma once

#include "xfode/membership.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace xfode {

/// Denominator floor for normalized TSK inference. Below it the output falls
/// back to the consequent of the rule whose center is nearest to the input.
inline constexpr double kDenominatorFloor = 1e-12;

/// First-order TSK system with one scalar input and n_x outputs:
///   f(z) = sum_p mu_p(z) d_p(z) / sum_p mu_p(z),   d_{p,o}(z) = a_p^o z + a_{p,0}^o
///
/// Consequents are stored rule-major as [p][o][slope, intercept]. The flat
/// parameter vector is the raw chain followed by the consequents.
class SingleInputFls {
 public:
  SingleInputFls(AntecedentChain chain, int n_x, std::vector<double> consequents);

  const AntecedentChain& chain() const { return chain_; }
  const DecodedMFs& mfs() const { return mfs_; }
  std::span<const double> consequents() const { return consequents_; }
  int rules() const { return chain_.rules; }
  int n_x() const { return n_x_; }

  double slope(int p, int o) const { return consequents_[index(p, o)]; }
  double intercept(int p, int o) const { return consequents_[index(p, o) + 1]; }

  std::size_t parameter_count() const { return chain_.raw.size() + consequents_.size(); }
  void get_parameters(std::span<double> out) const;
  void set_parameters(std::span<const double> params);

  /// Full-sum normalized inference into `out` (length n_x).
  void infer(double z, std::span<double> out) const;
  Eigen::VectorXd infer(double z) const;

  /// Same mapping restricted to the active pair of rules.
  Eigen::VectorXd infer_two_rule(double z) const;

  /// Accumulates dL/dtheta into `grad` (length parameter_count) given
  /// upstream = dL/df, and returns dL/dz.
  double backward(double z, std::span<const double> upstream, std::span<double> grad) const;

 private:
  std::size_t index(int p, int o) const { return 2 * (static_cast<std::size_t>(p) * n_x_ + o); }
  int nearest_rule(double z) const;

  AntecedentChain chain_;
  DecodedMFs mfs_;
  int n_x_;
  std::vector<double> consequents_;
};

Eigen::VectorXd fls_infer(const SingleInputFls& fls, double z);

/// Sum of single-input systems, one per combined-input dimension in [x; u]
/// order. Each block contributes an n_x vector to the state update.
class AdditiveDynamics {
 public:
  AdditiveDynamics(std::vector<SingleInputFls> blocks, int n_x, int n_u);

  int n_x() const { return n_x_; }
  int n_u() const { return n_u_; }
  int n_z() const { return n_x_ + n_u_; }
  const std::vector<SingleInputFls>& blocks() const { return blocks_; }

  std::size_t parameter_count() const;
  void get_parameters(std::span<double> out) const;
  void set_parameters(std::span<const double> params);

  /// Writes sum_i f_i(z_i) to `out`. If `contributions` is non-null it
  /// receives the per-block outputs as an n_z x n_x matrix.
  void infer(std::span<const double> z, std::span<double> out, Eigen::MatrixXd* contributions = nullptr) const;

  void backward(std::span<const double> z, std::span<const double> upstream, std::span<double> grad,
                std::span<double> dz) const;

 private:
  std::vector<SingleInputFls> blocks_;
  int n_x_;
  int n_u_;
};

Eigen::VectorXd additive_infer(const AdditiveDynamics& model, const Eigen::VectorXd& z);
/// Per-block contributions d_i, n_z x n_x.
Eigen::MatrixXd additive_contributions(const AdditiveDynamics& model, const Eigen::VectorXd& z);

/// Multi-input baseline: P rules with one GaussMF per input dimension,
/// product firing strength and consequents affine in the whole z.
///
/// Parameters are rule-major: for each rule, n_z centers, n_z raw sigmas,
/// then n_x rows of (n_z slopes, intercept).
class FodeDynamics {
 public:
  FodeDynamics(int rules, int n_x, int n_u, std::vector<double> params);

  int rules() const { return rules_; }
  int n_x() const { return n_x_; }
  int n_u() const { return n_u_; }
  int n_z() const { return n_x_ + n_u_; }

  std::size_t rule_size() const;
  std::size_t parameter_count() const { return params_.size(); }
  std::span<const double> parameters() const { return params_; }
  void set_parameters(std::span<const double> params);

  double center(int p, int i) const { return params_[rule_offset(p) + i]; }
  double sigma(int p, int i) const { return sigmas_[static_cast<std::size_t>(p) * n_z() + i]; }
  double slope(int p, int o, int i) const { return params_[consequent_offset(p, o) + i]; }
  double intercept(int p, int o) const { return params_[consequent_offset(p, o) + n_z()]; }

  void infer(std::span<const double> z, std::span<double> out) const;
  void backward(std::span<const double> z, std::span<const double> upstream, std::span<double> grad,
                std::span<double> dz) const;

  /// Firing strength of rule p (product of per-dimension Gaussians).
  double firing(int p, std::span<const double> z) const;

 private:
  std::size_t rule_offset(int p) const { return static_cast<std::size_t>(p) * rule_size(); }
  std::size_t consequent_offset(int p, int o) const {
    return rule_offset(p) + 2 * static_cast<std::size_t>(n_z()) + static_cast<std::size_t>(o) * (n_z() + 1);
  }
  void refresh_sigmas();
  int nearest_rule(std::span<const double> z) const;

  int rules_;
  int n_x_;
  int n_u_;
  std::vector<double> params_;
  std::vector<double> sigmas_;
};

Eigen::VectorXd fode_infer(const FodeDynamics& model, const Eigen::VectorXd& z);

}  // namespace xfode
