#pragma once

#include "xfode/model.hpp"
#include "xfode/synthetic.hpp"
#include "xfode/training.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace xfode {

/// Everything needed to reproduce one benchmark: data source, model
/// structure, training settings and the seed list.
struct ExperimentSpec {
  std::string name = "experiment";

  // Data: either a CSV file or a synthetic generator.
  std::filesystem::path data_path;
  std::optional<SyntheticKind> synthetic;
  std::size_t synthetic_samples = 3000;
  std::uint64_t data_seed = 1;
  int n_u = 1;
  int n_y = 1;
  std::size_t train_rows = 0;  // 0: first half

  ModelSpec model;
  int horizon = 20;
  int stride = 1;

  int epochs = 500;
  int mini_batch_size = 32;
  double learning_rate = 1e-2;
  double gradient_clip = 10.0;  // <= 0 disables clipping
  AdamSettings adam;

  std::vector<std::uint64_t> seeds = {1};

  TrainConfig train_config(std::uint64_t seed) const;
};

/// One documented key of the experiment file. The same table drives the
/// config-file parser and the command-line flags.
struct OptionDoc {
  std::string key;
  std::string help;
  std::string default_value;
};

const std::vector<OptionDoc>& experiment_options();

/// Applies `key = value`; throws InvalidConfig for unknown keys or bad values.
void apply_option(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Parses "key = value" lines; '#' starts a comment.
ExperimentSpec parse_experiment(const std::string& text, ExperimentSpec base = {});
ExperimentSpec load_experiment(const std::filesystem::path& path, ExperimentSpec base = {});

/// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace xfode
