#include "xfode/experiment.hpp"

#include "xfode/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace xfode {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::InvalidConfig, "bad value '" + value + "' for '" + key + "'");
  }
  return out;
}

using Setter = std::function<void(ExperimentSpec&, const std::string&, const std::string&)>;

struct OptionEntry {
  OptionDoc doc;
  Setter set;
};

const std::vector<OptionEntry>& option_table() {
  static const std::vector<OptionEntry> table = {
      {{"name", "Experiment name echoed in the report", "experiment"},
       [](ExperimentSpec& s, const std::string&, const std::string& v) { s.name = v; }},
      {{"data", "CSV file with n_u input columns then n_y output columns", ""},
       [](ExperimentSpec& s, const std::string&, const std::string& v) { s.data_path = v; }},
      {{"synthetic", "Synthetic record instead of a CSV: tank_like | damper_like | fuzzy_ground_truth", ""},
       [](ExperimentSpec& s, const std::string&, const std::string& v) { s.synthetic = parse_synthetic_kind(v); }},
      {{"samples", "Length of the synthetic record", "3000"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.synthetic_samples = parse_number<std::size_t>(k, v);
       }},
      {{"data-seed", "Seed of the synthetic record", "1"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.data_seed = parse_number<std::uint64_t>(k, v);
       }},
      {{"nu", "Number of input channels in the CSV", "1"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.n_u = parse_number<int>(k, v); }},
      {{"ny", "Number of output channels in the CSV", "1"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.n_y = parse_number<int>(k, v); }},
      {{"train-rows", "Leading rows used for training; the rest is the test split (0: half)", "0"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.train_rows = parse_number<std::size_t>(k, v);
       }},
      {{"model", "Model kind: xfode | afode | fode", "xfode"},
       [](ExperimentSpec& s, const std::string&, const std::string& v) { s.model.kind = parse_model_kind(v); }},
      {{"ps", "Partitioning strategy for xfode: 1 | 2 | 3", "1"},
       [](ExperimentSpec& s, const std::string&, const std::string& v) { s.model.strategy = parse_strategy(v); }},
      {{"sr", "State representation: 1 (lagged) | 2 (incremental)", "2"},
       [](ExperimentSpec& s, const std::string&, const std::string& v) { s.model.state.mode = parse_state_mode(v); }},
      {{"m", "Number of lags / difference orders", "0"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.model.state.order = parse_number<int>(k, v);
       }},
      {{"rules", "Rules per fuzzy system (P)", "5"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.model.rules = parse_number<int>(k, v); }},
      {{"rollout", "Training rollout horizon N", "20"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.horizon = parse_number<int>(k, v); }},
      {{"stride", "Offset between consecutive training windows", "1"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.stride = parse_number<int>(k, v); }},
      {{"epochs", "Training epochs", "500"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.epochs = parse_number<int>(k, v); }},
      {{"mbs", "Mini-batch size", "32"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.mini_batch_size = parse_number<int>(k, v);
       }},
      {{"lr", "Adam learning rate", "0.01"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.learning_rate = parse_number<double>(k, v);
       }},
      {{"clip", "Global gradient-norm clip (<= 0 disables)", "10"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.gradient_clip = parse_number<double>(k, v);
       }},
      {{"beta1", "Adam first-moment decay", "0.9"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.adam.beta1 = parse_number<double>(k, v); }},
      {{"beta2", "Adam second-moment decay", "0.999"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.adam.beta2 = parse_number<double>(k, v); }},
      {{"adam-eps", "Adam epsilon", "1e-08"},
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.adam.epsilon = parse_number<double>(k, v);
       }},
      {{"seeds", "Training seeds, e.g. 1,2,3 or 1-20", "1"},
       [](ExperimentSpec& s, const std::string&, const std::string& v) { s.seeds = parse_seed_list(v); }},
  };
  return table;
}

}  // namespace

TrainConfig ExperimentSpec::train_config(std::uint64_t seed) const {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.mini_batch_size = mini_batch_size;
  cfg.learning_rate = learning_rate;
  cfg.seed = seed;
  cfg.adam = adam;
  if (gradient_clip > 0.0) {
    cfg.gradient_clip = gradient_clip;
  } else {
    cfg.gradient_clip.reset();
  }
  return cfg;
}

const std::vector<OptionDoc>& experiment_options() {
  static const std::vector<OptionDoc> docs = [] {
    std::vector<OptionDoc> out;
    for (const auto& e : option_table()) out.push_back(e.doc);
    return out;
  }();
  return docs;
}

void apply_option(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  // Underscores are accepted as an alternative spelling in config files.
  std::string normalized = key;
  for (char& c : normalized) {
    if (c == '_') c = '-';
  }
  for (const auto& e : option_table()) {
    if (e.doc.key == normalized) {
      e.set(spec, normalized, trim(value));
      return;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown experiment key '" + key + "'");
}

ExperimentSpec parse_experiment(const std::string& text, ExperimentSpec base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_option(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentSpec load_experiment(const std::filesystem::path& path, ExperimentSpec base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment(buffer.str(), std::move(base));
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (const auto dash = item.find('-'); dash != std::string::npos && dash > 0) {
      const auto lo = parse_number<std::uint64_t>("seeds", trim(item.substr(0, dash)));
      const auto hi = parse_number<std::uint64_t>("seeds", trim(item.substr(dash + 1)));
      if (hi < lo) throw Error(ErrorCode::InvalidConfig, "empty seed range '" + item + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_number<std::uint64_t>("seeds", item));
    }
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "seed list is empty");
  return seeds;
}

}  // namespace xfode
