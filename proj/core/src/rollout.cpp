#include "xfode/rollout.hpp"

#include "xfode/error.hpp"

#include <cmath>
#include <sstream>

namespace xfode {

RolloutResult rollout(const Model& model, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs,
                      bool with_contributions) {
  const int n_x = model.n_x();
  const int n_u = model.spec().n_u;
  if (x0.size() != n_x) throw Error(ErrorCode::DimensionMismatch, "initial state has wrong length");
  if (inputs.cols() != n_u) throw Error(ErrorCode::DimensionMismatch, "input sequence has wrong width");

  const Eigen::Index steps = inputs.rows();
  RolloutResult result;
  result.states.resize(steps + 1, n_x);
  result.states.row(0) = x0.transpose();
  if (with_contributions) result.contributions.reserve(static_cast<std::size_t>(steps));

  Eigen::VectorXd z(n_x + n_u);
  Eigen::VectorXd delta(n_x);
  Eigen::MatrixXd parts;
  for (Eigen::Index k = 0; k < steps; ++k) {
    z.head(n_x) = result.states.row(k).transpose();
    z.tail(n_u) = inputs.row(k).transpose();
    model.derivative(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
                     std::span<double>(delta.data(), static_cast<std::size_t>(n_x)),
                     with_contributions && model.is_additive() ? &parts : nullptr);
    result.states.row(k + 1) = result.states.row(k) + delta.transpose();
    if (with_contributions && model.is_additive()) result.contributions.push_back(parts);

    const auto next = result.states.row(k + 1);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceLimit) {
      std::ostringstream msg;
      msg << "rollout diverged at step " << (k + 1) << " of " << steps << "; |x| max = " << next.cwiseAbs().maxCoeff()
          << ", previous |x| max = " << result.states.row(k).cwiseAbs().maxCoeff();
      throw Error(ErrorCode::NumericalDivergence, msg.str());
    }
  }
  return result;
}

Simulation simulate(const Model& model, const RawDataset& ds, bool with_contributions) {
  const auto& spec = model.spec();
  if (ds.n_u() != spec.n_u || ds.n_y() != spec.n_y) {
    throw Error(ErrorCode::DimensionMismatch, "dataset channels do not match the model");
  }
  const auto seq = build_states(ds.outputs, spec.state);
  const Eigen::Index valid = seq.states.rows();
  const auto offset = static_cast<Eigen::Index>(seq.offset);

  const Eigen::MatrixXd inputs = ds.inputs.middleRows(offset, valid - 1);
  auto run = rollout(model, seq.states.row(0).transpose(), inputs, with_contributions);

  Simulation sim;
  sim.offset = seq.offset;
  sim.measured = ds.outputs.bottomRows(valid);
  sim.predicted = run.states.leftCols(spec.n_y);
  sim.contributions = std::move(run.contributions);
  return sim;
}

}  // namespace xfode
