#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace xfode {

/// Time-aligned input/output record. Row k of `inputs` and `outputs` is
/// sample k; both matrices always have the same row count.
struct RawDataset {
  Eigen::MatrixXd inputs;   // K x n_u
  Eigen::MatrixXd outputs;  // K x n_y
  std::string name;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;

  std::size_t sample_count() const { return static_cast<std::size_t>(outputs.rows()); }
  int n_u() const { return static_cast<int>(inputs.cols()); }
  int n_y() const { return static_cast<int>(outputs.cols()); }
};

/// Per-channel z-score statistics, inputs first then outputs.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  int channels() const { return static_cast<int>(mean.size()); }
};

RawDataset load_csv(const std::filesystem::path& path, int n_u, int n_y);
void save_csv(const RawDataset& ds, const std::filesystem::path& path);

/// Rejects NaN/Inf entries and mismatched shapes.
void validate(const RawDataset& ds);

/// Population mean/std per channel; zero-variance channels get std = 1.
NormStats fit_normalizer(const RawDataset& train);

RawDataset normalize(const RawDataset& ds, const NormStats& stats);
RawDataset denormalize(const RawDataset& ds, const NormStats& stats);

/// Output-channel slices of the statistics (used to map predictions back).
Eigen::VectorXd output_mean(const NormStats& stats, int n_u);
Eigen::VectorXd output_std(const NormStats& stats, int n_u);

/// First `train_rows` samples become the training split, the rest the test
/// split. No shuffling.
std::pair<RawDataset, RawDataset> split_rows(const RawDataset& ds, std::size_t train_rows);

}  // namespace xfode
