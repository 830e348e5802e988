#include "test_util.hpp"

#include "xfode/dataset.hpp"
#include "xfode/error.hpp"

#include <gtest/gtest.h>

using namespace xfode;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no xfode::Error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(Dataset, ParsesSmallFile) {
  test::TempDir dir;
  test::write_text(dir / "d.csv", "u1,y1\n0,1\n0,2\n0,4\n");
  const auto ds = load_csv(dir / "d.csv", 1, 1);
  ASSERT_EQ(ds.sample_count(), 3u);
  EXPECT_EQ(ds.inputs, Eigen::MatrixXd::Zero(3, 1));
  EXPECT_EQ(ds.outputs(0, 0), 1.0);
  EXPECT_EQ(ds.outputs(1, 0), 2.0);
  EXPECT_EQ(ds.outputs(2, 0), 4.0);
  EXPECT_EQ(ds.input_names, std::vector<std::string>{"u1"});
  EXPECT_EQ(ds.output_names, std::vector<std::string>{"y1"});
}

TEST(Dataset, BlankCellIsNonFinite) {
  test::TempDir dir;
  test::write_text(dir / "d.csv", "u1,y1\n0,1\n,2\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "d.csv", 1, 1); }), ErrorCode::NonFiniteValue);
}

TEST(Dataset, RejectsNanAndText) {
  test::TempDir dir;
  test::write_text(dir / "a.csv", "u1,y1\n0,1\n0,nan\n");
  test::write_text(dir / "b.csv", "u1,y1\n0,1\n0,abc\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "a.csv", 1, 1); }), ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of([&] { load_csv(dir / "b.csv", 1, 1); }), ErrorCode::NonFiniteValue);
}

TEST(Dataset, MissingFileAndHeaderMismatch) {
  test::TempDir dir;
  EXPECT_EQ(code_of([&] { load_csv(dir / "none.csv", 1, 1); }), ErrorCode::MissingFile);
  test::write_text(dir / "d.csv", "u1,y1,y2\n0,1,2\n0,2,3\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "d.csv", 1, 1); }), ErrorCode::HeaderMismatch);
  EXPECT_NO_THROW(load_csv(dir / "d.csv", 1, 2));
}

TEST(Dataset, SaveLoadRoundTripIsExact) {
  test::TempDir dir;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  RawDataset ds;
  ds.inputs = Eigen::MatrixXd::NullaryExpr(50, 2, [&] { return n(rng); });
  ds.outputs = Eigen::MatrixXd::NullaryExpr(50, 1, [&] { return n(rng); });
  save_csv(ds, dir / "r.csv");
  const auto back = load_csv(dir / "r.csv", 2, 1);
  EXPECT_EQ(back.inputs, ds.inputs);
  EXPECT_EQ(back.outputs, ds.outputs);
}

TEST(Dataset, TwoTankShapedSplit) {
  RawDataset ds;
  ds.inputs = Eigen::MatrixXd::Random(3000, 1);
  ds.outputs = Eigen::MatrixXd::Random(3000, 1);
  const auto [train, test] = split_rows(ds, 1500);
  EXPECT_EQ(train.sample_count(), 1500u);
  EXPECT_EQ(test.sample_count(), 1500u);
  EXPECT_EQ(test.outputs(0, 0), ds.outputs(1500, 0));
}

TEST(Normalizer, FitStatistics) {
  RawDataset ds;
  ds.inputs.resize(4, 2);
  ds.inputs << 1, 5, 3, 5, 1, 5, 3, 5;
  ds.outputs.resize(4, 1);
  ds.outputs << 0, 0, 3, 3;
  const auto s = fit_normalizer(ds);
  ASSERT_EQ(s.channels(), 3);
  EXPECT_DOUBLE_EQ(s.mean(0), 2.0);
  EXPECT_DOUBLE_EQ(s.std(0), 1.0);
  EXPECT_DOUBLE_EQ(s.mean(1), 5.0);
  EXPECT_DOUBLE_EQ(s.std(1), 1.0);
  EXPECT_DOUBLE_EQ(s.mean(2), 1.5);
  EXPECT_DOUBLE_EQ(s.std(2), 1.5);
}

TEST(Normalizer, ScalarCases) {
  RawDataset ds;
  ds.inputs.resize(2, 1);
  ds.inputs << 2, 5;
  ds.outputs.resize(2, 1);
  ds.outputs << 0, 0;
  NormStats s;
  s.mean = Eigen::Vector2d(2.0, 1.0);
  s.std = Eigen::Vector2d(1.0, 2.0);
  ds.outputs << 5, 1;
  const auto n = normalize(ds, s);
  EXPECT_DOUBLE_EQ(n.inputs(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(n.outputs(0, 0), 2.0);
}

TEST(Normalizer, RoundTrip) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(3.0, 7.0);
  RawDataset ds;
  ds.inputs = Eigen::MatrixXd::NullaryExpr(10, 1, [&] { return n(rng); });
  ds.outputs = Eigen::MatrixXd::NullaryExpr(10, 1, [&] { return n(rng); });
  const auto s = fit_normalizer(ds);
  const auto back = denormalize(normalize(ds, s), s);
  EXPECT_LE((back.inputs - ds.inputs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((back.outputs - ds.outputs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalizer, ChannelMismatch) {
  RawDataset ds;
  ds.inputs = Eigen::MatrixXd::Zero(3, 1);
  ds.outputs = Eigen::MatrixXd::Zero(3, 1);
  NormStats s;
  s.mean = Eigen::VectorXd::Zero(3);
  s.std = Eigen::VectorXd::Ones(3);
  EXPECT_EQ(code_of([&] { normalize(ds, s); }), ErrorCode::DimensionMismatch);
}
