#include "properties.hpp"

#include "xfode/error.hpp"
#include "xfode/synthetic.hpp"
#include "xfode/training.hpp"

#include <gtest/gtest.h>

using namespace xfode;

namespace {

TrajectorySet one_trajectory(std::initializer_list<double> states) {
  TrajectorySet set;
  set.horizon = static_cast<int>(states.size()) - 1;
  Trajectory t;
  t.states.resize(static_cast<Eigen::Index>(states.size()), 1);
  Eigen::Index k = 0;
  for (const double s : states) t.states(k++, 0) = s;
  t.inputs = Eigen::MatrixXd::Zero(t.states.rows(), 1);
  set.trajectories.push_back(t);
  return set;
}

}  // namespace

TEST(Loss, HandSum) {
  const auto set = one_trajectory({0.0, 1.0, 2.0});
  Eigen::MatrixXd pred(3, 1);
  pred << 0.0, 1.5, 1.5;
  const std::vector<Eigen::MatrixXd> preds = {pred};
  EXPECT_DOUBLE_EQ(l1_loss(preds, set), 1.0);
  const std::vector<Eigen::MatrixXd> exact = {set.trajectories[0].states};
  EXPECT_EQ(l1_loss(exact, set), 0.0);
}

TEST(Loss, MeanOverBatch) {
  auto set = one_trajectory({0.0, 1.0, 2.0});
  Eigen::MatrixXd pred(3, 1);
  pred << 0.0, 1.5, 1.5;
  set.trajectories.push_back(set.trajectories[0]);
  const std::vector<Eigen::MatrixXd> preds = {pred, pred};
  EXPECT_DOUBLE_EQ(l1_loss(preds, set), 1.0);
  const std::vector<Eigen::MatrixXd> wrong = {pred};
  EXPECT_THROW(l1_loss(wrong, set), Error);
}

TEST(Gradient, ZeroResidualGivesZeroGradient) {
  const auto spec = test::make_spec(ModelKind::XFode, Strategy::PS1, 3, 1, 1, StateMode::Lagged, 1);
  Model model = make_model(spec, InputDomains(3, {-1.0, 1.0}), 1);
  auto params = model.parameters();
  const std::size_t chain = AntecedentChain::raw_size(Strategy::PS1, 3);
  const std::size_t block = chain + 2 * 3 * 2;
  for (int i = 0; i < 3; ++i) {
    for (std::size_t j = chain; j < block; ++j) params[i * block + j] = 0.0;
  }
  model.set_parameters(params);
  std::mt19937_64 rng(1);
  auto set = test::random_trajectories(model, 3, 6, rng);
  for (auto& t : set.trajectories) {
    for (Eigen::Index k = 1; k < t.states.rows(); ++k) t.states.row(k) = t.states.row(0);
  }
  const auto lg = compute_gradient(model, set);
  EXPECT_EQ(lg.loss, 0.0);
  for (const double g : lg.gradient) EXPECT_EQ(g, 0.0);
}

TEST(Gradient, SingleStepIntercept) {
  // x+ = x + f_x(x) + f_u(u) with two PS1 rules at 0 and 1 on the state
  // block. At x = 0.3 the normalized weights are 0.7 and 0.3.
  const auto spec = test::make_spec(ModelKind::XFode, Strategy::PS1, 2, 1, 1, StateMode::Lagged, 0);
  std::vector<SingleInputFls> blocks;
  blocks.emplace_back(init_chain(Strategy::PS1, 2, 0.0, 1.0), 1, std::vector<double>{0.2, 0.1, -0.3, 0.4});
  blocks.emplace_back(init_chain(Strategy::PS1, 2, -1.0, 1.0), 1, std::vector<double>{0.0, 0.0, 0.0, 0.0});
  const Model model(spec, AdditiveDynamics(std::move(blocks), 1, 1));
  const std::size_t chain = AntecedentChain::raw_size(Strategy::PS1, 2);
  for (const double target : {5.0, -5.0}) {
    TrajectorySet set = one_trajectory({0.3, target});
    set.trajectories.push_back(set.trajectories[0]);
    const auto lg = compute_gradient(model, set);
    const double s = target > 0 ? -1.0 : 1.0;  // sign(prediction - target)
    // B = 2 identical trajectories: (1/B) * sum = per-trajectory value.
    EXPECT_NEAR(lg.gradient[chain + 1], s * 0.7, 1e-12);
    EXPECT_NEAR(lg.gradient[chain + 3], s * 0.3, 1e-12);
    EXPECT_NEAR(lg.gradient[chain + 0], s * 0.7 * 0.3, 1e-12);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  const std::pair<ModelKind, Strategy> cases[] = {{ModelKind::XFode, Strategy::PS1},
                                                  {ModelKind::XFode, Strategy::PS2},
                                                  {ModelKind::XFode, Strategy::PS3},
                                                  {ModelKind::AFode, Strategy::FreeGauss},
                                                  {ModelKind::Fode, Strategy::FreeGauss}};
  std::uint64_t seed = 100;
  for (const auto& [kind, strategy] : cases) {
    const auto r = test::check_gradient(kind, strategy, 4, seed++);
    EXPECT_GT(r.compared, 0u);
    EXPECT_LE(r.max_relative_error, 1e-4) << to_string(kind) << " " << to_string(strategy);
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  AdamOptimizer adam(3, 0.1);
  std::vector<double> p = {1.0, 2.0, 3.0};
  const std::vector<double> g = {0.5, -2.0, 0.0};
  adam.step(p, g);
  EXPECT_NEAR(p[0], 0.9, 1e-7);
  EXPECT_NEAR(p[1], 2.1, 1e-7);
  EXPECT_EQ(p[2], 3.0);
  EXPECT_EQ(adam.steps(), 1);
}

namespace {

struct Fixture {
  Model model;
  TrajectorySet set;
};

Fixture small_problem() {
  const auto data = fuzzy_ground_truth(400, 3);
  const auto stats = fit_normalizer(data.data);
  const StateConfig state{StateMode::Incremental, 1};
  auto set = build_trajectories(normalize(data.data, stats), state, 10, 5);
  const auto spec = test::make_spec(ModelKind::XFode, Strategy::PS2, 3, 1, 1, StateMode::Incremental, 1);
  return {make_model(spec, input_domains(set), 4), std::move(set)};
}

}  // namespace

TEST(Train, DeterministicTraces) {
  auto a = small_problem();
  auto b = small_problem();
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 9;
  const auto ra = train(a.model, a.set, cfg);
  const auto rb = train(b.model, b.set, cfg);
  EXPECT_EQ(ra.loss_trace, rb.loss_trace);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
  EXPECT_EQ(ra.loss_trace.size(), 5u);
}

TEST(Train, ZeroLearningRateKeepsParameters) {
  auto f = small_problem();
  const auto before = f.model.parameters();
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.learning_rate = 0.0;
  train(f.model, f.set, cfg);
  EXPECT_EQ(f.model.parameters(), before);
}

TEST(Train, KeepsBestEpochParameters) {
  auto f = small_problem();
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.seed = 2;
  const auto run = train(f.model, f.set, cfg);
  EXPECT_EQ(run.best_loss, *std::min_element(run.loss_trace.begin(), run.loss_trace.end()));
  EXPECT_EQ(run.loss_trace[run.best_epoch - 1], run.best_loss);
  EXPECT_EQ(f.model.parameters(), run.best_params);
  EXPECT_EQ(f.model.metadata().final_loss, run.best_loss);
}

TEST(Train, AllBatchesDivergedIsAnError) {
  const auto spec = test::make_spec(ModelKind::XFode, Strategy::PS1, 2, 1, 1, StateMode::Lagged, 0);
  std::vector<SingleInputFls> blocks;
  blocks.emplace_back(init_chain(Strategy::PS1, 2, -1.0, 1.0), 1, std::vector<double>{1, 0, 1, 0});
  blocks.emplace_back(init_chain(Strategy::PS1, 2, -1.0, 1.0), 1, std::vector<double>{0, 0, 0, 0});
  Model model(spec, AdditiveDynamics(std::move(blocks), 1, 1));
  std::mt19937_64 rng(1);
  auto set = test::random_trajectories(model, 4, 40, rng);
  for (auto& t : set.trajectories) t.states(0, 0) = 1.0;
  TrainConfig cfg;
  cfg.epochs = 2;
  try {
    train(model, set, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivergedRun);
  }
}

TEST(Train, RejectsBadConfig) {
  auto f = small_problem();
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train(f.model, f.set, cfg), Error);
  cfg.epochs = 1;
  cfg.mini_batch_size = 0;
  EXPECT_THROW(train(f.model, f.set, cfg), Error);
}

TEST(Train, RecoversFuzzyGroundTruth) {
  const auto data = fuzzy_ground_truth(2000, 1);
  const auto stats = fit_normalizer(data.data);
  const auto spec = test::make_spec(ModelKind::XFode, Strategy::PS1, 5, 1, 1, StateMode::Lagged, 0);
  const auto set = build_trajectories(normalize(data.data, stats), spec.state, 20, 1);
  Model model = make_model(spec, input_domains(set), 1);
  const double initial = test::batch_loss(model, set);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 1;
  const auto run = train(model, set, cfg);
  EXPECT_LE(run.loss_trace.back(), 0.1 * initial);
}
