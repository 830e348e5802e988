#include "test_util.hpp"

#include "cli.hpp"
#include "xfode/dataset.hpp"
#include "xfode/model_io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

using namespace xfode;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, NoSubcommandIsUsageError) {
  const auto r = run_cli({});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("train"), std::string::npos);
}

TEST(Cli, TrainWithoutFlagsPrintsUsage) {
  const auto r = run_cli({"train"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--data"), std::string::npos);
  EXPECT_NE(r.err.find("--out"), std::string::npos);
}

TEST(Cli, UnknownFlagIsRejected) {
  EXPECT_EQ(run_cli({"gen-data", "--out", "x.csv", "--bogus", "1"}).code, 1);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run_cli({"benchmark", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--rollout"), std::string::npos);
  EXPECT_NE(r.out.find("--seeds"), std::string::npos);
}

TEST(Cli, GenerateTrainSimulateExport) {
  test::TempDir dir;
  const auto data = (dir / "d.csv").string();
  const auto model = (dir / "m.json").string();

  auto r = run_cli({"gen-data", "--kind", "tank_like", "--n", "2000", "--seed", "7", "--out", data});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_csv(data, 1, 1).sample_count(), 2000u);

  r = run_cli({"train", "--data", data, "--out", model, "--m", "2", "--epochs", "3", "--stride", "10",
               "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("epoch 3"), std::string::npos);
  const auto loaded = load_model(model);
  EXPECT_EQ(loaded.spec().state.order, 2);
  EXPECT_EQ(loaded.metadata().epochs, 3);
  EXPECT_EQ(loaded.parameter_count(), 148u);

  const auto pred = (dir / "p.csv").string();
  const auto parts = (dir / "c.csv").string();
  r = run_cli({"simulate", "--model", model, "--data", data, "--out", pred, "--dump-contributions", parts});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sim = load_csv(pred, 2, 1);
  EXPECT_EQ(sim.sample_count(), 2000u - 2u);
  EXPECT_EQ(sim.inputs(0, 0), 2.0);
  const auto contributions = load_csv(parts, 1, 12);
  EXPECT_EQ(contributions.sample_count(), 2000u - 3u);

  r = run_cli({"simulate", "--model", model, "--data", data});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2000 - 2 + 1);

  r = run_cli({"export-mfs", "--model", model, "--out-dir", (dir / "mfs").string(), "--points", "101"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_csv(dir / "mfs" / "mf_z1.csv", 1, 5).sample_count(), 101u);
}

TEST(Cli, BenchmarkWithConfigAndOverrides) {
  test::TempDir dir;
  test::write_text(dir / "exp.cfg",
                   "synthetic = damper_like\nsamples = 400\nepochs = 50\nrules = 3\nrollout = 5\nstride = 10\n"
                   "seeds = 1-2\n");
  const auto json_path = (dir / "r.json").string();
  const auto r = run_cli({"benchmark", "--config", (dir / "exp.cfg").string(), "--epochs", "2", "--json",
                          json_path, "--threads", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(test::read_text(json_path));
  EXPECT_EQ(doc["config"]["epochs"], 2);
  EXPECT_EQ(doc["config"]["P"], 3);
  EXPECT_EQ(doc["seeds"].size(), 2u);
}

TEST(Cli, RuntimeErrorsExitWithTwo) {
  test::TempDir dir;
  auto r = run_cli({"simulate", "--model", (dir / "none.json").string(), "--data", (dir / "none.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("MissingFile"), std::string::npos) << r.err;

  test::write_text(dir / "bad.csv", "u1,y1\n0,1\n0,\n");
  r = run_cli({"train", "--data", (dir / "bad.csv").string(), "--out", (dir / "m.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("NonFiniteValue"), std::string::npos) << r.err;
}

TEST(Cli, BadOptionValueIsUsageError) {
  test::TempDir dir;
  const auto r = run_cli({"gen-data", "--kind", "lake", "--out", (dir / "x.csv").string()});
  EXPECT_EQ(r.code, 1);
}
