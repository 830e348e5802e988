#pragma once

#include "xfode/dataset.hpp"
#include "xfode/fuzzy_models.hpp"
#include "xfode/state_repr.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace xfode {

/// XFode: additive single-input blocks on a PS1/PS2/PS3 partition.
/// AFode: additive blocks with free GaussMFs.
/// Fode:  one multi-input system with free GaussMFs.
enum class ModelKind { XFode, AFode, Fode };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

struct ModelSpec {
  ModelKind kind = ModelKind::XFode;
  Strategy strategy = Strategy::PS1;  // ignored unless kind == XFode
  int rules = 5;
  int n_u = 1;
  int n_y = 1;
  StateConfig state;

  int n_x() const { return state.state_dim(n_y); }
  int n_z() const { return n_x() + n_u; }
  /// Antecedent family actually used by this kind.
  Strategy antecedent() const { return kind == ModelKind::XFode ? strategy : Strategy::FreeGauss; }
};

/// Closed-form learnable-parameter count:
///   xFODE n_z (2 + P + 2 P n_x),  AFODE n_z (2P + 2 P n_x),
///   FODE  2 P n_z + P (n_z + 1) n_x.
std::size_t count_parameters(const ModelSpec& spec);

struct ModelMetadata {
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_loss = 0.0;
};

/// A complete parameterized vector field plus the normalization it was
/// trained under.
class Model {
 public:
  Model(ModelSpec spec, AdditiveDynamics dynamics, NormStats norm = {});
  Model(ModelSpec spec, FodeDynamics dynamics, NormStats norm = {});

  const ModelSpec& spec() const { return spec_; }
  const NormStats& norm() const { return norm_; }
  void set_norm(NormStats norm) { norm_ = std::move(norm); }
  ModelMetadata& metadata() { return meta_; }
  const ModelMetadata& metadata() const { return meta_; }

  bool is_additive() const { return std::holds_alternative<AdditiveDynamics>(dynamics_); }
  const AdditiveDynamics& additive() const { return std::get<AdditiveDynamics>(dynamics_); }
  const FodeDynamics& fode() const { return std::get<FodeDynamics>(dynamics_); }

  int n_x() const { return spec_.n_x(); }
  int n_z() const { return spec_.n_z(); }

  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  /// State update d(z) for the combined input z = [x; u].
  void derivative(std::span<const double> z, std::span<double> out,
                  Eigen::MatrixXd* contributions = nullptr) const;
  Eigen::VectorXd derivative(const Eigen::VectorXd& z) const;

  /// Vector-Jacobian product of `derivative`: accumulates
  /// upstream^T dd/dtheta into `grad` and upstream^T dd/dz into `dz`.
  void backward(std::span<const double> z, std::span<const double> upstream, std::span<double> grad,
                std::span<double> dz) const;

 private:
  ModelSpec spec_;
  std::variant<AdditiveDynamics, FodeDynamics> dynamics_;
  NormStats norm_;
  ModelMetadata meta_;
};

std::size_t count_parameters(const Model& model);

/// (min, max) per combined-input dimension, used to place initial partitions.
using InputDomains = std::vector<std::pair<double, double>>;

/// Ranges of z = [x; u] over all samples of a trajectory set.
InputDomains input_domains(const TrajectorySet& set);

/// Fresh model: partitions spread uniformly over each domain, consequents
/// i.i.d. uniform in [-0.1, 0.1]. FODE centers are drawn uniformly inside
/// each domain. Deterministic in `seed`.
Model make_model(const ModelSpec& spec, const InputDomains& domains, std::uint64_t seed);

}  // namespace xfode
