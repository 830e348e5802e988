#pragma once

#include "xfode/dataset.hpp"
#include "xfode/experiment.hpp"
#include "xfode/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xfode {

/// Per-channel root mean squared error.
Eigen::VectorXd rmse(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred);

struct SeedResult {
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string failure;             // diagnostic when diverged
  Eigen::VectorXd rmse_normalized;  // length n_y
  Eigen::VectorXd rmse_original;    // length n_y, original units
  double train_loss = 0.0;          // best epoch loss
  int best_epoch = 0;
  int skipped_batches = 0;
};

struct RmseSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd standard_error;  // sample std / sqrt(n); 0 for a single seed
};

struct EvalReport {
  ExperimentSpec config;
  std::size_t parameter_count = 0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::vector<SeedResult> seeds;
  int diverged_seeds = 0;
  bool single_seed = false;
  RmseSummary normalized;
  RmseSummary original;
};

/// Mean and standard error over the non-diverged seeds; throws
/// AllSeedsDiverged when none is left.
void summarize(EvalReport& report);

/// Trains and free-run evaluates one model per seed. Seeds run on up to
/// `threads` workers (0: XFODE_THREADS or hardware concurrency); the report
/// is assembled in seed-list order.
EvalReport benchmark(const ExperimentSpec& spec, unsigned threads = 0);

/// Train/test split with train-split normalization, as used by benchmark.
struct PreparedData {
  RawDataset train;  // normalized
  RawDataset test;   // normalized
  NormStats stats;
};

RawDataset load_experiment_data(const ExperimentSpec& spec);
PreparedData prepare_data(const ExperimentSpec& spec);

std::string report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

/// Human-readable names of the combined-input dimensions, e.g. for an
/// incremental state with m = 2: y1, dy1, d2y1, u1.
struct DimensionName {
  std::string symbol;
  std::string description;
};

std::vector<DimensionName> dimension_names(const ModelSpec& spec);

/// One CSV per combined-input dimension (columns z, mu_1 .. mu_P over the
/// export grid) plus manifest.json. Returns the written paths.
std::vector<std::filesystem::path> export_mfs(const Model& model, const std::filesystem::path& out_dir,
                                              int points = 501);

/// Worker count from XFODE_THREADS, defaulting to hardware concurrency.
unsigned default_threads();

}  // namespace xfode
