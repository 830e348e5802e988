#include "xfode/model.hpp"

#include "xfode/error.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <random>

namespace xfode {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::XFode: return "xfode";
    case ModelKind::AFode: return "afode";
    case ModelKind::Fode: return "fode";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "xfode") return ModelKind::XFode;
  if (t == "afode") return ModelKind::AFode;
  if (t == "fode") return ModelKind::Fode;
  throw Error(ErrorCode::InvalidConfig, "unknown model kind '" + text + "'");
}

std::size_t count_parameters(const ModelSpec& spec) {
  const auto P = static_cast<std::size_t>(spec.rules);
  const auto n_x = static_cast<std::size_t>(spec.n_x());
  const auto n_z = static_cast<std::size_t>(spec.n_z());
  switch (spec.kind) {
    case ModelKind::XFode: return n_z * (2 + P + 2 * P * n_x);
    case ModelKind::AFode: return n_z * (2 * P + 2 * P * n_x);
    case ModelKind::Fode: return 2 * P * n_z + P * (n_z + 1) * n_x;
  }
  return 0;
}

Model::Model(ModelSpec spec, AdditiveDynamics dynamics, NormStats norm)
    : spec_(spec), dynamics_(std::move(dynamics)), norm_(std::move(norm)) {
  const auto& a = std::get<AdditiveDynamics>(dynamics_);
  if (spec_.kind == ModelKind::Fode || a.n_x() != spec_.n_x() || a.n_u() != spec_.n_u) {
    throw Error(ErrorCode::DimensionMismatch, "additive dynamics do not match the model spec");
  }
}

Model::Model(ModelSpec spec, FodeDynamics dynamics, NormStats norm)
    : spec_(spec), dynamics_(std::move(dynamics)), norm_(std::move(norm)) {
  const auto& f = std::get<FodeDynamics>(dynamics_);
  if (spec_.kind != ModelKind::Fode || f.n_x() != spec_.n_x() || f.n_u() != spec_.n_u ||
      f.rules() != spec_.rules) {
    throw Error(ErrorCode::DimensionMismatch, "FODE dynamics do not match the model spec");
  }
}

std::size_t Model::parameter_count() const {
  return std::visit([](const auto& d) { return d.parameter_count(); }, dynamics_);
}

std::vector<double> Model::parameters() const {
  std::vector<double> out(parameter_count());
  if (is_additive()) {
    additive().get_parameters(out);
  } else {
    const auto p = fode().parameters();
    std::copy(p.begin(), p.end(), out.begin());
  }
  return out;
}

void Model::set_parameters(std::span<const double> params) {
  std::visit([&](auto& d) { d.set_parameters(params); }, dynamics_);
}

void Model::derivative(std::span<const double> z, std::span<double> out, Eigen::MatrixXd* contributions) const {
  if (is_additive()) {
    additive().infer(z, out, contributions);
  } else {
    fode().infer(z, out);
  }
}

Eigen::VectorXd Model::derivative(const Eigen::VectorXd& z) const {
  if (z.size() != n_z()) throw Error(ErrorCode::DimensionMismatch, "combined input has wrong length");
  Eigen::VectorXd out(n_x());
  derivative(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
             std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

void Model::backward(std::span<const double> z, std::span<const double> upstream, std::span<double> grad,
                     std::span<double> dz) const {
  std::visit([&](const auto& d) { d.backward(z, upstream, grad, dz); }, dynamics_);
}

std::size_t count_parameters(const Model& model) { return model.parameter_count(); }

InputDomains input_domains(const TrajectorySet& set) {
  if (set.empty()) throw Error(ErrorCode::InsufficientSamples, "no trajectories");
  const auto n_x = set.trajectories.front().states.cols();
  const auto n_u = set.trajectories.front().inputs.cols();
  InputDomains domains(static_cast<std::size_t>(n_x + n_u),
                       {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const auto& t : set.trajectories) {
    for (Eigen::Index i = 0; i < n_x; ++i) {
      domains[i].first = std::min(domains[i].first, t.states.col(i).minCoeff());
      domains[i].second = std::max(domains[i].second, t.states.col(i).maxCoeff());
    }
    for (Eigen::Index i = 0; i < n_u; ++i) {
      auto& d = domains[static_cast<std::size_t>(n_x + i)];
      d.first = std::min(d.first, t.inputs.col(i).minCoeff());
      d.second = std::max(d.second, t.inputs.col(i).maxCoeff());
    }
  }
  return domains;
}

Model make_model(const ModelSpec& spec, const InputDomains& domains, std::uint64_t seed) {
  if (domains.size() != static_cast<std::size_t>(spec.n_z())) {
    throw Error(ErrorCode::DimensionMismatch, "need one domain per combined-input dimension");
  }
  if (spec.rules < 2 && spec.kind != ModelKind::Fode) {
    throw Error(ErrorCode::InvalidConfig, "additive models need at least 2 rules");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> consequent(-0.1, 0.1);
  const int n_x = spec.n_x();
  const int n_z = spec.n_z();

  if (spec.kind == ModelKind::Fode) {
    const int P = spec.rules;
    FodeDynamics shape(P, n_x, spec.n_u, std::vector<double>(static_cast<std::size_t>(P) *
                                                                 (2 * n_z + n_x * (n_z + 1))));
    std::vector<double> params;
    params.reserve(shape.parameter_count());
    for (int p = 0; p < P; ++p) {
      std::vector<double> raw_sigmas;
      for (int i = 0; i < n_z; ++i) {
        auto [lo, hi] = domains[i];
        if (!(hi > lo)) {
          lo -= 0.5;
          hi += 0.5;
        }
        params.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
        raw_sigmas.push_back(softplus_inverse((hi - lo) / (2.0 * std::max(P - 1, 1))));
      }
      params.insert(params.end(), raw_sigmas.begin(), raw_sigmas.end());
      for (int o = 0; o < n_x; ++o) {
        for (int i = 0; i <= n_z; ++i) params.push_back(consequent(rng));
      }
    }
    return Model(spec, FodeDynamics(P, n_x, spec.n_u, std::move(params)));
  }

  std::vector<SingleInputFls> blocks;
  blocks.reserve(static_cast<std::size_t>(n_z));
  for (int i = 0; i < n_z; ++i) {
    auto chain = init_chain(spec.antecedent(), spec.rules, domains[i].first, domains[i].second);
    std::vector<double> cons(2 * static_cast<std::size_t>(spec.rules) * n_x);
    for (auto& c : cons) c = consequent(rng);
    blocks.emplace_back(std::move(chain), n_x, std::move(cons));
  }
  return Model(spec, AdditiveDynamics(std::move(blocks), n_x, spec.n_u));
}

}  // namespace xfode
