#include "xfode/fuzzy_models.hpp"

#include "xfode/error.hpp"

#include <cmath>
#include <limits>

namespace xfode {
namespace {

void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// SingleInputFls

SingleInputFls::SingleInputFls(AntecedentChain chain, int n_x, std::vector<double> consequents)
    : chain_(std::move(chain)), mfs_(decode(chain_)), n_x_(n_x), consequents_(std::move(consequents)) {
  require(n_x_ >= 1, ErrorCode::InvalidConfig, "a block needs at least one output");
  require(consequents_.size() == 2 * static_cast<std::size_t>(chain_.rules) * n_x_, ErrorCode::DimensionMismatch,
          "consequent array must hold P x n_x x 2 values");
}

void SingleInputFls::get_parameters(std::span<double> out) const {
  require(out.size() == parameter_count(), ErrorCode::DimensionMismatch, "parameter span has wrong length");
  std::copy(chain_.raw.begin(), chain_.raw.end(), out.begin());
  std::copy(consequents_.begin(), consequents_.end(), out.begin() + static_cast<std::ptrdiff_t>(chain_.raw.size()));
}

void SingleInputFls::set_parameters(std::span<const double> params) {
  require(params.size() == parameter_count(), ErrorCode::DimensionMismatch, "parameter span has wrong length");
  const auto split = params.begin() + static_cast<std::ptrdiff_t>(chain_.raw.size());
  std::copy(params.begin(), split, chain_.raw.begin());
  std::copy(split, params.end(), consequents_.begin());
  mfs_ = decode(chain_);
}

int SingleInputFls::nearest_rule(double z) const {
  int best = 0;
  for (int p = 1; p < rules(); ++p) {
    if (std::abs(z - mfs_.centers[p]) < std::abs(z - mfs_.centers[best])) best = p;
  }
  return best;
}

void SingleInputFls::infer(double z, std::span<double> out) const {
  thread_local std::vector<double> grades;
  grades.resize(static_cast<std::size_t>(rules()));
  evaluate_all(mfs_, z, grades);

  double total = 0.0;
  for (const double g : grades) total += g;

  std::fill(out.begin(), out.end(), 0.0);
  if (total < kDenominatorFloor) {
    const int q = nearest_rule(z);
    for (int o = 0; o < n_x_; ++o) out[o] = slope(q, o) * z + intercept(q, o);
    return;
  }
  for (int p = 0; p < rules(); ++p) {
    if (grades[p] == 0.0) continue;
    const double w = grades[p] / total;
    for (int o = 0; o < n_x_; ++o) out[o] += w * (slope(p, o) * z + intercept(p, o));
  }
}

Eigen::VectorXd SingleInputFls::infer(double z) const {
  Eigen::VectorXd out(n_x_);
  infer(z, std::span<double>(out.data(), static_cast<std::size_t>(n_x_)));
  return out;
}

Eigen::VectorXd SingleInputFls::infer_two_rule(double z) const {
  const int a = active_pair(mfs_, z).first;
  const int b = a + 1;
  const double mu_a = evaluate(mfs_, a, z);
  const double mu_b = evaluate(mfs_, b, z);
  const double total = mu_a + mu_b;
  Eigen::VectorXd out(n_x_);
  if (total < kDenominatorFloor) {
    const int q = nearest_rule(z);
    for (int o = 0; o < n_x_; ++o) out(o) = slope(q, o) * z + intercept(q, o);
    return out;
  }
  out.setZero();
  for (const int p : {a, b}) {
    const double mu = p == a ? mu_a : mu_b;
    if (mu == 0.0) continue;
    const double w = mu / total;
    for (int o = 0; o < n_x_; ++o) out(o) += w * (slope(p, o) * z + intercept(p, o));
  }
  return out;
}

double SingleInputFls::backward(double z, std::span<const double> upstream, std::span<double> grad) const {
  const int P = rules();
  const std::size_t chain_size = chain_.raw.size();
  auto d_cons = grad.subspan(chain_size);

  thread_local std::vector<GradeJet> jets;
  thread_local std::vector<double> outputs;
  thread_local std::vector<double> d_centers, d_left, d_right;
  jets.resize(static_cast<std::size_t>(P));
  outputs.assign(static_cast<std::size_t>(n_x_), 0.0);

  double total = 0.0;
  for (int p = 0; p < P; ++p) {
    jets[p] = evaluate_with_grad(mfs_, p, z);
    total += jets[p].value;
  }

  double d_z = 0.0;
  if (total < kDenominatorFloor) {
    // Nearest-rule fallback is piecewise constant in the antecedents.
    const int q = nearest_rule(z);
    for (int o = 0; o < n_x_; ++o) {
      d_cons[index(q, o)] += upstream[o] * z;
      d_cons[index(q, o) + 1] += upstream[o];
      d_z += upstream[o] * slope(q, o);
    }
    return d_z;
  }

  for (int p = 0; p < P; ++p) {
    if (jets[p].value == 0.0) continue;
    const double w = jets[p].value / total;
    for (int o = 0; o < n_x_; ++o) outputs[o] += w * (slope(p, o) * z + intercept(p, o));
  }

  d_centers.assign(static_cast<std::size_t>(P), 0.0);
  d_left.assign(static_cast<std::size_t>(P), 0.0);
  d_right.assign(static_cast<std::size_t>(P), 0.0);

  for (int p = 0; p < P; ++p) {
    const GradeJet& jet = jets[p];
    const double w = jet.value / total;
    double d_grade = 0.0;
    for (int o = 0; o < n_x_; ++o) {
      const double g = upstream[o];
      const double a = slope(p, o);
      const double d = a * z + intercept(p, o);
      if (w != 0.0) {
        d_cons[index(p, o)] += g * w * z;
        d_cons[index(p, o) + 1] += g * w;
        d_z += g * w * a;
      }
      d_grade += g * (d - outputs[o]);
    }
    d_grade /= total;
    d_z += d_grade * jet.d_z;
    d_centers[jet.source] += d_grade * jet.d_center;
    d_left[jet.source] += d_grade * jet.d_left;
    d_right[jet.source] += d_grade * jet.d_right;
  }

  decode_backward(chain_, d_centers, d_left, d_right, grad.subspan(0, chain_size));
  return d_z;
}

Eigen::VectorXd fls_infer(const SingleInputFls& fls, double z) { return fls.infer(z); }

// ---------------------------------------------------------------------------
// AdditiveDynamics

AdditiveDynamics::AdditiveDynamics(std::vector<SingleInputFls> blocks, int n_x, int n_u)
    : blocks_(std::move(blocks)), n_x_(n_x), n_u_(n_u) {
  require(n_x_ >= 1 && n_u_ >= 0, ErrorCode::InvalidConfig, "invalid additive model dimensions");
  require(blocks_.size() == static_cast<std::size_t>(n_z()), ErrorCode::DimensionMismatch,
          "additive model needs one block per combined-input dimension");
  for (const auto& b : blocks_) {
    require(b.n_x() == n_x_, ErrorCode::DimensionMismatch, "every block must output n_x values");
  }
}

std::size_t AdditiveDynamics::parameter_count() const {
  std::size_t total = 0;
  for (const auto& b : blocks_) total += b.parameter_count();
  return total;
}

void AdditiveDynamics::get_parameters(std::span<double> out) const {
  require(out.size() == parameter_count(), ErrorCode::DimensionMismatch, "parameter span has wrong length");
  std::size_t offset = 0;
  for (const auto& b : blocks_) {
    b.get_parameters(out.subspan(offset, b.parameter_count()));
    offset += b.parameter_count();
  }
}

void AdditiveDynamics::set_parameters(std::span<const double> params) {
  require(params.size() == parameter_count(), ErrorCode::DimensionMismatch, "parameter span has wrong length");
  std::size_t offset = 0;
  for (auto& b : blocks_) {
    b.set_parameters(params.subspan(offset, b.parameter_count()));
    offset += b.parameter_count();
  }
}

void AdditiveDynamics::infer(std::span<const double> z, std::span<double> out,
                             Eigen::MatrixXd* contributions) const {
  require(z.size() == static_cast<std::size_t>(n_z()), ErrorCode::DimensionMismatch,
          "combined input has wrong length");
  thread_local std::vector<double> part;
  part.resize(static_cast<std::size_t>(n_x_));
  std::fill(out.begin(), out.end(), 0.0);
  if (contributions) contributions->resize(n_z(), n_x_);
  for (int i = 0; i < n_z(); ++i) {
    blocks_[i].infer(z[i], part);
    for (int o = 0; o < n_x_; ++o) {
      out[o] += part[o];
      if (contributions) (*contributions)(i, o) = part[o];
    }
  }
}

void AdditiveDynamics::backward(std::span<const double> z, std::span<const double> upstream, std::span<double> grad,
                                std::span<double> dz) const {
  std::size_t offset = 0;
  for (int i = 0; i < n_z(); ++i) {
    const auto count = blocks_[i].parameter_count();
    dz[i] += blocks_[i].backward(z[i], upstream, grad.subspan(offset, count));
    offset += count;
  }
}

Eigen::VectorXd additive_infer(const AdditiveDynamics& model, const Eigen::VectorXd& z) {
  if (z.size() != model.n_z()) throw Error(ErrorCode::DimensionMismatch, "combined input has wrong length");
  Eigen::VectorXd out(model.n_x());
  model.infer(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
              std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Eigen::MatrixXd additive_contributions(const AdditiveDynamics& model, const Eigen::VectorXd& z) {
  if (z.size() != model.n_z()) throw Error(ErrorCode::DimensionMismatch, "combined input has wrong length");
  Eigen::VectorXd out(model.n_x());
  Eigen::MatrixXd parts;
  model.infer(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
              std::span<double>(out.data(), static_cast<std::size_t>(out.size())), &parts);
  return parts;
}

// ---------------------------------------------------------------------------
// FodeDynamics

FodeDynamics::FodeDynamics(int rules, int n_x, int n_u, std::vector<double> params)
    : rules_(rules), n_x_(n_x), n_u_(n_u), params_(std::move(params)) {
  require(rules_ >= 1 && n_x_ >= 1 && n_u_ >= 0, ErrorCode::InvalidConfig, "invalid FODE dimensions");
  require(params_.size() == static_cast<std::size_t>(rules_) * rule_size(), ErrorCode::DimensionMismatch,
          "FODE parameter vector has wrong length");
  refresh_sigmas();
}

std::size_t FodeDynamics::rule_size() const {
  const auto nz = static_cast<std::size_t>(n_z());
  return 2 * nz + static_cast<std::size_t>(n_x_) * (nz + 1);
}

void FodeDynamics::set_parameters(std::span<const double> params) {
  require(params.size() == params_.size(), ErrorCode::DimensionMismatch, "parameter span has wrong length");
  std::copy(params.begin(), params.end(), params_.begin());
  refresh_sigmas();
}

void FodeDynamics::refresh_sigmas() {
  for (double v : params_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteParameter, "FODE parameter is not finite");
  }
  sigmas_.resize(static_cast<std::size_t>(rules_) * n_z());
  for (int p = 0; p < rules_; ++p) {
    for (int i = 0; i < n_z(); ++i) {
      sigmas_[static_cast<std::size_t>(p) * n_z() + i] = softplus(params_[rule_offset(p) + n_z() + i]);
    }
  }
}

double FodeDynamics::firing(int p, std::span<const double> z) const {
  double exponent = 0.0;
  for (int i = 0; i < n_z(); ++i) {
    const double u = (z[i] - center(p, i)) / sigma(p, i);
    exponent += u * u;
  }
  return std::exp(-0.5 * exponent);
}

int FodeDynamics::nearest_rule(std::span<const double> z) const {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int p = 0; p < rules_; ++p) {
    double dist = 0.0;
    for (int i = 0; i < n_z(); ++i) dist += (z[i] - center(p, i)) * (z[i] - center(p, i));
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

void FodeDynamics::infer(std::span<const double> z, std::span<double> out) const {
  require(z.size() == static_cast<std::size_t>(n_z()), ErrorCode::DimensionMismatch,
          "combined input has wrong length");
  thread_local std::vector<double> weights;
  weights.resize(static_cast<std::size_t>(rules_));
  double total = 0.0;
  for (int p = 0; p < rules_; ++p) {
    weights[p] = firing(p, z);
    total += weights[p];
  }
  auto consequent = [&](int p, int o) {
    double d = intercept(p, o);
    for (int i = 0; i < n_z(); ++i) d += slope(p, o, i) * z[i];
    return d;
  };
  std::fill(out.begin(), out.end(), 0.0);
  if (total < kDenominatorFloor) {
    const int q = nearest_rule(z);
    for (int o = 0; o < n_x_; ++o) out[o] = consequent(q, o);
    return;
  }
  for (int p = 0; p < rules_; ++p) {
    const double w = weights[p] / total;
    for (int o = 0; o < n_x_; ++o) out[o] += w * consequent(p, o);
  }
}

void FodeDynamics::backward(std::span<const double> z, std::span<const double> upstream, std::span<double> grad,
                            std::span<double> dz) const {
  thread_local std::vector<double> weights, outputs, values;
  const int nz = n_z();
  weights.resize(static_cast<std::size_t>(rules_));
  values.resize(static_cast<std::size_t>(rules_) * n_x_);
  outputs.assign(static_cast<std::size_t>(n_x_), 0.0);

  double total = 0.0;
  for (int p = 0; p < rules_; ++p) {
    weights[p] = firing(p, z);
    total += weights[p];
    for (int o = 0; o < n_x_; ++o) {
      double d = intercept(p, o);
      for (int i = 0; i < nz; ++i) d += slope(p, o, i) * z[i];
      values[static_cast<std::size_t>(p) * n_x_ + o] = d;
    }
  }

  auto accumulate_consequent = [&](int p, double scale) {
    for (int o = 0; o < n_x_; ++o) {
      const double g = upstream[o] * scale;
      const std::size_t base = consequent_offset(p, o);
      for (int i = 0; i < nz; ++i) {
        grad[base + i] += g * z[i];
        dz[i] += g * slope(p, o, i);
      }
      grad[base + nz] += g;
    }
  };

  if (total < kDenominatorFloor) {
    accumulate_consequent(nearest_rule(z), 1.0);
    return;
  }

  for (int p = 0; p < rules_; ++p) {
    for (int o = 0; o < n_x_; ++o) outputs[o] += weights[p] / total * values[static_cast<std::size_t>(p) * n_x_ + o];
  }

  for (int p = 0; p < rules_; ++p) {
    const double w = weights[p] / total;
    accumulate_consequent(p, w);
    if (weights[p] == 0.0) continue;
    double d_weight = 0.0;
    for (int o = 0; o < n_x_; ++o) {
      d_weight += upstream[o] * (values[static_cast<std::size_t>(p) * n_x_ + o] - outputs[o]);
    }
    d_weight *= weights[p] / total;  // dL/dw_p times w_p
    const std::size_t base = rule_offset(p);
    for (int i = 0; i < nz; ++i) {
      const double s = sigma(p, i);
      const double diff = z[i] - center(p, i);
      grad[base + i] += d_weight * diff / (s * s);
      grad[base + nz + i] +=
          d_weight * diff * diff / (s * s * s) * softplus_derivative(params_[base + nz + i]);
      dz[i] -= d_weight * diff / (s * s);
    }
  }
}

Eigen::VectorXd fode_infer(const FodeDynamics& model, const Eigen::VectorXd& z) {
  if (z.size() != model.n_z()) throw Error(ErrorCode::DimensionMismatch, "combined input has wrong length");
  Eigen::VectorXd out(model.n_x());
  model.infer(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
              std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

}  // namespace xfode
