#include "test_util.hpp"

#include "xfode/error.hpp"
#include "xfode/state_repr.hpp"

#include <gtest/gtest.h>

using namespace xfode;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> v) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (const double x : v) m(i++, 0) = x;
  return m;
}

RawDataset random_record(int k, int n_u, int n_y, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  RawDataset ds;
  ds.inputs = Eigen::MatrixXd::NullaryExpr(k, n_u, [&] { return n(rng); });
  ds.outputs = Eigen::MatrixXd::NullaryExpr(k, n_y, [&] { return n(rng); });
  return ds;
}

}  // namespace

TEST(StateRepr, IncrementalHandCase) {
  const auto seq = build_states(column({1, 2, 4}), {StateMode::Incremental, 2});
  ASSERT_EQ(seq.states.rows(), 1);
  EXPECT_EQ(seq.offset, 2u);
  EXPECT_EQ(seq.states.row(0), Eigen::RowVector3d(4, 2, 1));
}

TEST(StateRepr, LaggedHandCase) {
  const auto seq = build_states(column({1, 2, 4}), {StateMode::Lagged, 2});
  ASSERT_EQ(seq.states.rows(), 1);
  EXPECT_EQ(seq.offset, 2u);
  EXPECT_EQ(seq.states.row(0), Eigen::RowVector3d(4, 2, 1));
}

TEST(StateRepr, OrderZeroIsIdentity) {
  const auto y = column({3, -1, 2, 7});
  for (const auto mode : {StateMode::Lagged, StateMode::Incremental}) {
    const auto seq = build_states(y, {mode, 0});
    EXPECT_EQ(seq.offset, 0u);
    EXPECT_EQ(seq.states, y);
  }
}

TEST(StateRepr, TooShortRecord) {
  EXPECT_THROW(build_states(column({1, 2}), {StateMode::Lagged, 2}), Error);
}

TEST(StateRepr, IncrementalIsIntegerTransformOfLagged) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(-50, 50);
  Eigen::MatrixXd y = Eigen::MatrixXd::NullaryExpr(40, 2, [&] { return static_cast<double>(v(rng)); });
  const auto lag = build_states(y, {StateMode::Lagged, 2});
  const auto inc = build_states(y, {StateMode::Incremental, 2});
  Eigen::Matrix3d t;
  t << 1, 0, 0, 1, -1, 0, 1, -2, 1;
  for (Eigen::Index k = 0; k < lag.states.rows(); ++k) {
    for (int c = 0; c < 2; ++c) {
      const Eigen::Vector3d l(lag.states(k, c), lag.states(k, 2 + c), lag.states(k, 4 + c));
      const Eigen::Vector3d i(inc.states(k, c), inc.states(k, 2 + c), inc.states(k, 4 + c));
      EXPECT_EQ(t * l, i);
    }
  }
}

TEST(StateRepr, OutputOfState) {
  EXPECT_EQ(output_of_state(Eigen::Vector3d(4, 2, 1), 1), Eigen::VectorXd::Constant(1, 4.0));
  EXPECT_EQ(output_of_state(Eigen::Vector4d(1, 2, 3, 4), 2), Eigen::Vector2d(1, 2));
}

TEST(StateRepr, OutputRecoveredFromStates) {
  std::mt19937_64 rng(9);
  const auto ds = random_record(30, 1, 2, rng);
  for (const auto mode : {StateMode::Lagged, StateMode::Incremental}) {
    for (int m = 0; m <= 3; ++m) {
      const auto seq = build_states(ds.outputs, {mode, m});
      for (Eigen::Index k = 0; k < seq.states.rows(); ++k) {
        const Eigen::VectorXd y = output_of_state(seq.states.row(k).transpose(), 2);
        EXPECT_EQ(y.transpose(), ds.outputs.row(k + static_cast<Eigen::Index>(seq.offset)));
      }
    }
  }
}

TEST(StateRepr, CombinedInput) {
  EXPECT_EQ(combined_input(Eigen::Vector2d(1, 2), Eigen::VectorXd::Constant(1, 3.0)), Eigen::Vector3d(1, 2, 3));
}

TEST(Trajectories, WindowCounts) {
  std::mt19937_64 rng(1);
  auto ds = random_record(41, 1, 1, rng);
  EXPECT_EQ(build_trajectories(ds, {StateMode::Lagged, 0}, 20, 20).size(), 2u);
  ds = random_record(24, 1, 1, rng);
  EXPECT_EQ(build_trajectories(ds, {StateMode::Incremental, 2}, 20, 1).size(), 2u);
}

TEST(Trajectories, WindowsAreConsistentWithRawRecord) {
  std::mt19937_64 rng(2);
  const auto ds = random_record(60, 2, 1, rng);
  const StateConfig cfg{StateMode::Incremental, 2};
  const auto set = build_trajectories(ds, cfg, 7, 3);
  ASSERT_FALSE(set.empty());
  for (const auto& t : set.trajectories) {
    ASSERT_EQ(t.states.rows(), 8);
    ASSERT_EQ(t.inputs.rows(), 8);
    const auto s = static_cast<Eigen::Index>(t.start);
    for (Eigen::Index k = 0; k < 8; ++k) {
      const Eigen::Index n = s + k;
      const double y0 = ds.outputs(n, 0);
      const double y1 = ds.outputs(n - 1, 0);
      const double y2 = ds.outputs(n - 2, 0);
      EXPECT_EQ(t.states(k, 0), y0);
      EXPECT_DOUBLE_EQ(t.states(k, 1), y0 - y1);
      EXPECT_DOUBLE_EQ(t.states(k, 2), (y0 - y1) - (y1 - y2));
      EXPECT_EQ(t.inputs.row(k), ds.inputs.row(n));
    }
  }
}

TEST(Trajectories, RejectsBadArguments) {
  std::mt19937_64 rng(3);
  const auto ds = random_record(10, 1, 1, rng);
  EXPECT_THROW(build_trajectories(ds, {StateMode::Lagged, 0}, 0), Error);
  EXPECT_THROW(build_trajectories(ds, {StateMode::Lagged, 0}, 3, 0), Error);
  EXPECT_THROW(build_trajectories(ds, {StateMode::Lagged, 0}, 20), Error);
}

TEST(StateRepr, ParseMode) {
  EXPECT_EQ(parse_state_mode("SR1"), StateMode::Lagged);
  EXPECT_EQ(parse_state_mode("2"), StateMode::Incremental);
  EXPECT_THROW(parse_state_mode("sr3"), Error);
}
