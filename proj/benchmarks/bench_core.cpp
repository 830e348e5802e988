#include "xfode/fuzzy_models.hpp"
#include "xfode/model.hpp"
#include "xfode/rollout.hpp"
#include "xfode/training.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace xfode;

namespace {

ModelSpec spec_for(ModelKind kind, Strategy strategy) {
  ModelSpec spec;
  spec.kind = kind;
  spec.strategy = strategy;
  spec.rules = 5;
  spec.n_u = 1;
  spec.n_y = 1;
  spec.state = {StateMode::Incremental, 2};
  return spec;
}

Model model_for(ModelKind kind, Strategy strategy) {
  const auto spec = spec_for(kind, strategy);
  return make_model(spec, InputDomains(static_cast<std::size_t>(spec.n_z()), {-1.0, 1.0}), 1);
}

// Every rule gets slope -0.1 and intercept 0 so long free runs stay bounded.
Model damped_model_for(ModelKind kind) {
  Model model = model_for(kind, Strategy::PS1);
  const auto& spec = model.spec();
  const std::size_t n_x = static_cast<std::size_t>(spec.n_x());
  const std::size_t n_z = static_cast<std::size_t>(spec.n_z());
  const std::size_t P = static_cast<std::size_t>(spec.rules);
  auto params = model.parameters();
  if (model.is_additive()) {
    const std::size_t chain = AntecedentChain::raw_size(spec.antecedent(), spec.rules);
    const std::size_t block = chain + 2 * P * n_x;
    for (std::size_t i = 0; i < n_z; ++i) {
      for (std::size_t j = chain; j < block; ++j) params[i * block + j] = (j - chain) % 2 == 0 ? -0.1 : 0.0;
    }
  } else {
    const std::size_t rule = 2 * n_z + n_x * (n_z + 1);
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t j = 2 * n_z; j < rule; ++j) params[p * rule + j] = (j - 2 * n_z) % (n_z + 1) == n_z ? 0.0 : -0.1;
    }
  }
  model.set_parameters(params);
  return model;
}

TrajectorySet batch_for(const Model& model, int count, int horizon) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TrajectorySet set;
  set.horizon = horizon;
  for (int j = 0; j < count; ++j) {
    Trajectory t;
    t.inputs = Eigen::MatrixXd::NullaryExpr(horizon + 1, model.spec().n_u, [&] { return u(rng); });
    t.states = Eigen::MatrixXd::NullaryExpr(horizon + 1, model.n_x(), [&] { return u(rng); });
    set.trajectories.push_back(std::move(t));
  }
  return set;
}

void BM_FlsInfer(benchmark::State& state) {
  const auto strategy = static_cast<Strategy>(state.range(0));
  const SingleInputFls fls(init_chain(strategy, 5, -1.0, 1.0), 3, std::vector<double>(30, 0.1));
  std::vector<double> out(3);
  double z = -1.2;
  for (auto _ : state) {
    fls.infer(z, out);
    benchmark::DoNotOptimize(out.data());
    z = z > 1.2 ? -1.2 : z + 0.001;
  }
}
BENCHMARK(BM_FlsInfer)->Arg(static_cast<int>(Strategy::PS1))->Arg(static_cast<int>(Strategy::PS2))
    ->Arg(static_cast<int>(Strategy::PS3))->Arg(static_cast<int>(Strategy::FreeGauss));

void BM_Rollout(benchmark::State& state) {
  const auto model = damped_model_for(static_cast<ModelKind>(state.range(0)));
  const Eigen::MatrixXd inputs = Eigen::MatrixXd::Random(state.range(1), 1) * 0.5;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(model.n_x());
  for (auto _ : state) benchmark::DoNotOptimize(rollout(model, x0, inputs).states.data());
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_Rollout)->Args({0, 1500})->Args({1, 1500})->Args({2, 1500});

void BM_Gradient(benchmark::State& state) {
  const auto model = model_for(ModelKind::XFode, static_cast<Strategy>(state.range(0)));
  const auto batch = batch_for(model, 32, 20);
  for (auto _ : state) benchmark::DoNotOptimize(compute_gradient(model, batch).loss);
}
BENCHMARK(BM_Gradient)->Arg(static_cast<int>(Strategy::PS1))->Arg(static_cast<int>(Strategy::PS2))
    ->Arg(static_cast<int>(Strategy::PS3));

}  // namespace

BENCHMARK_MAIN();
