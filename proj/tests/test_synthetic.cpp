#include "test_util.hpp"

#include "xfode/error.hpp"
#include "xfode/rollout.hpp"
#include "xfode/synthetic.hpp"
#include "xfode/training.hpp"

#include <gtest/gtest.h>

using namespace xfode;

TEST(Synthetic, TankDrainsWithoutInflow) {
  const auto y = tank_response(Eigen::VectorXd::Zero(500), 0.8);
  for (Eigen::Index k = 1; k < y.size(); ++k) EXPECT_LE(y(k), y(k - 1));
  EXPECT_LT(y(499), 0.8);
}

TEST(Synthetic, DeterministicInSeed) {
  for (const auto kind : {SyntheticKind::TankLike, SyntheticKind::DamperLike, SyntheticKind::FuzzyGroundTruth}) {
    const auto a = generate_synthetic(kind, 400, 5);
    const auto b = generate_synthetic(kind, 400, 5);
    const auto c = generate_synthetic(kind, 400, 6);
    EXPECT_EQ(a.inputs, b.inputs);
    EXPECT_EQ(a.outputs, b.outputs);
    EXPECT_NE(a.inputs, c.inputs);
    EXPECT_EQ(a.sample_count(), 400u);
    EXPECT_TRUE(a.outputs.allFinite());
    EXPECT_GT(a.outputs.maxCoeff() - a.outputs.minCoeff(), 1e-3) << to_string(kind);
  }
  EXPECT_THROW(generate_synthetic(SyntheticKind::TankLike, 50, 1), Error);
}

TEST(Synthetic, PrbsLevelsAndHolds) {
  const auto u = multilevel_prbs(1000, -1.0, 2.0, 5, 9, 3);
  EXPECT_GE(u.minCoeff(), -1.0);
  EXPECT_LE(u.maxCoeff(), 2.0);
  int run = 1;
  for (Eigen::Index k = 1; k < u.size(); ++k) {
    if (u(k) == u(k - 1)) {
      ++run;
    } else {
      EXPECT_GE(run, 5);
      EXPECT_LE(run, 9);
      run = 1;
    }
  }
}

TEST(Synthetic, GroundTruthModelReproducesItsRecord) {
  const auto gt = fuzzy_ground_truth(500, 2);
  const auto sim = simulate(gt.model, gt.data);
  EXPECT_EQ(sim.predicted, gt.data.outputs);
}

TEST(Synthetic, GroundTruthParametersGiveNearZeroLoss) {
  // Express the generator in normalized units: with x = (y - my)/sy and
  // u' = (u - mu)/su, the state block maps z' to f_x(sy z' + my) / sy.
  const auto gt = fuzzy_ground_truth(2000, 4);
  const auto stats = fit_normalizer(gt.data);
  const auto norm = normalize(gt.data, stats);
  const double mu = stats.mean(0), su = stats.std(0), my = stats.mean(1), sy = stats.std(1);

  std::vector<SingleInputFls> blocks;
  const double shift[] = {my, mu};
  const double scale[] = {sy, su};
  for (int i = 0; i < 2; ++i) {
    const auto& src = gt.model.additive().blocks()[i];
    AntecedentChain chain = src.chain();
    chain.raw[0] = (chain.raw[0] - shift[i]) / scale[i];
    for (std::size_t r = 1; r < chain.raw.size(); ++r) chain.raw[r] = softplus_inverse(softplus(chain.raw[r]) / scale[i]);
    std::vector<double> cons;
    for (int p = 0; p < src.rules(); ++p) {
      const double a = src.slope(p, 0);
      const double b = src.intercept(p, 0);
      cons.push_back(a * scale[i] / sy);
      cons.push_back((a * shift[i] + b) / sy);
    }
    blocks.emplace_back(chain, 1, cons);
  }
  const Model model(gt.model.spec(), AdditiveDynamics(std::move(blocks), 1, 1));
  const auto set = build_trajectories(norm, model.spec().state, 20, 1);
  EXPECT_LT(test::batch_loss(model, set), 1e-2);
}
