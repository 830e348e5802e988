#include "xfode/evaluation.hpp"

#include "xfode/error.hpp"
#include "xfode/rollout.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace xfode {
namespace {

using nlohmann::json;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

SeedResult run_seed(const ExperimentSpec& spec, const PreparedData& data, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;
  try {
    const auto trajectories = build_trajectories(data.train, spec.model.state, spec.horizon, spec.stride);
    Model model = make_model(spec.model, input_domains(trajectories), seed);
    model.set_norm(data.stats);
    const auto run = train(model, trajectories, spec.train_config(seed));
    result.train_loss = run.best_loss;
    result.best_epoch = run.best_epoch;
    result.skipped_batches = run.skipped_batches;

    const auto sim = simulate(model, data.test);
    result.rmse_normalized = rmse(sim.measured, sim.predicted);
    const Eigen::RowVectorXd scale = output_std(data.stats, spec.n_u).transpose();
    const Eigen::RowVectorXd shift = output_mean(data.stats, spec.n_u).transpose();
    const Eigen::MatrixXd measured = (sim.measured.array().rowwise() * scale.array()).rowwise() + shift.array();
    const Eigen::MatrixXd predicted = (sim.predicted.array().rowwise() * scale.array()).rowwise() + shift.array();
    result.rmse_original = rmse(measured, predicted);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalDivergence && e.code() != ErrorCode::DivergedRun) throw;
    result.diverged = true;
    result.failure = e.what();
  }
  return result;
}

RmseSummary summarize_channel(const std::vector<const Eigen::VectorXd*>& values, int n_y) {
  RmseSummary s;
  s.mean = Eigen::VectorXd::Zero(n_y);
  s.standard_error = Eigen::VectorXd::Zero(n_y);
  const double n = static_cast<double>(values.size());
  for (const auto* v : values) s.mean += *v;
  s.mean /= n;
  if (values.size() > 1) {
    Eigen::VectorXd var = Eigen::VectorXd::Zero(n_y);
    for (const auto* v : values) var += (*v - s.mean).cwiseAbs2();
    var /= (n - 1.0);
    s.standard_error = var.cwiseSqrt() / std::sqrt(n);
  }
  return s;
}

std::string describe_state(StateMode mode, int order, int channel) {
  const std::string y = "y" + std::to_string(channel + 1);
  if (mode == StateMode::Lagged) {
    return order == 0 ? "output " + y + " at k" : "output " + y + " at k-" + std::to_string(order);
  }
  switch (order) {
    case 0: return "output " + y + " (position)";
    case 1: return "first difference of " + y + " (velocity)";
    case 2: return "second difference of " + y + " (acceleration)";
    default: return "difference of order " + std::to_string(order) + " of " + y;
  }
}

}  // namespace

Eigen::VectorXd rmse(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols() || y_true.rows() < 1) {
    throw Error(ErrorCode::ShapeMismatch, "rmse needs equal, non-empty shapes");
  }
  return ((y_true - y_pred).cwiseAbs2().colwise().sum() / static_cast<double>(y_true.rows()))
      .cwiseSqrt()
      .transpose();
}

void summarize(EvalReport& report) {
  std::vector<const Eigen::VectorXd*> normalized;
  std::vector<const Eigen::VectorXd*> original;
  report.diverged_seeds = 0;
  for (const auto& s : report.seeds) {
    if (s.diverged) {
      ++report.diverged_seeds;
      continue;
    }
    normalized.push_back(&s.rmse_normalized);
    original.push_back(&s.rmse_original);
  }
  if (normalized.empty()) {
    throw Error(ErrorCode::AllSeedsDiverged, "all " + std::to_string(report.seeds.size()) + " seeds diverged");
  }
  const int n_y = static_cast<int>(normalized.front()->size());
  report.single_seed = normalized.size() == 1;
  report.normalized = summarize_channel(normalized, n_y);
  report.original = summarize_channel(original, n_y);
}

unsigned default_threads() {
  if (const char* env = std::getenv("XFODE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RawDataset load_experiment_data(const ExperimentSpec& spec) {
  if (spec.synthetic) return generate_synthetic(*spec.synthetic, spec.synthetic_samples, spec.data_seed);
  if (spec.data_path.empty()) throw Error(ErrorCode::InvalidConfig, "experiment names neither data nor synthetic");
  return load_csv(spec.data_path, spec.n_u, spec.n_y);
}

PreparedData prepare_data(const ExperimentSpec& spec) {
  const auto raw = load_experiment_data(spec);
  if (raw.n_u() != spec.model.n_u || raw.n_y() != spec.model.n_y) {
    throw Error(ErrorCode::DimensionMismatch, "data channels do not match the model spec");
  }
  const std::size_t rows = spec.train_rows == 0 ? raw.sample_count() / 2 : spec.train_rows;
  auto [train, test] = split_rows(raw, rows);
  PreparedData out;
  out.stats = fit_normalizer(train);
  out.train = normalize(train, out.stats);
  out.test = normalize(test, out.stats);
  return out;
}

EvalReport benchmark(const ExperimentSpec& input, unsigned threads) {
  if (input.seeds.empty()) throw Error(ErrorCode::InvalidConfig, "seed list is empty");
  ExperimentSpec spec = input;
  if (spec.synthetic) {
    // Synthetic records are single-input single-output.
    spec.n_u = 1;
    spec.n_y = 1;
  }
  spec.model.n_u = spec.n_u;
  spec.model.n_y = spec.n_y;

  const auto data = prepare_data(spec);

  EvalReport report;
  report.config = spec;
  report.parameter_count = count_parameters(spec.model);
  report.train_samples = data.train.sample_count();
  report.test_samples = data.test.sample_count();
  report.seeds.resize(spec.seeds.size());

  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads == 0 ? default_threads() : threads,
                                      static_cast<unsigned>(spec.seeds.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) report.seeds[i] = run_seed(spec, data, spec.seeds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(spec.seeds.size());
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < spec.seeds.size(); i = next++) {
          try {
            report.seeds[i] = run_seed(spec, data, spec.seeds[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  summarize(report);
  return report;
}

std::string report_json(const EvalReport& report) {
  const auto& c = report.config;
  json doc;
  doc["name"] = c.name;
  doc["config"] = {
      {"data", c.synthetic ? "synthetic:" + to_string(*c.synthetic) : c.data_path.string()},
      {"data_seed", c.data_seed},
      {"model_kind", to_string(c.model.kind)},
      {"strategy", to_string(c.model.antecedent())},
      {"sr_mode", to_string(c.model.state.mode)},
      {"m", c.model.state.order},
      {"P", c.model.rules},
      {"N", c.horizon},
      {"stride", c.stride},
      {"n_u", c.n_u},
      {"n_y", c.n_y},
      {"epochs", c.epochs},
      {"mbs", c.mini_batch_size},
      {"lr", c.learning_rate},
      {"clip", c.gradient_clip},
  };
  doc["parameter_count"] = report.parameter_count;
  doc["train_samples"] = report.train_samples;
  doc["test_samples"] = report.test_samples;
  json seeds = json::array();
  for (const auto& s : report.seeds) {
    json entry = {{"seed", s.seed}, {"diverged", s.diverged}};
    if (s.diverged) {
      entry["failure"] = s.failure;
    } else {
      entry["rmse_normalized"] = to_std(s.rmse_normalized);
      entry["rmse"] = to_std(s.rmse_original);
      entry["train_loss"] = s.train_loss;
      entry["best_epoch"] = s.best_epoch;
      entry["skipped_batches"] = s.skipped_batches;
    }
    seeds.push_back(std::move(entry));
  }
  doc["seeds"] = std::move(seeds);
  doc["diverged_seeds"] = report.diverged_seeds;
  doc["single_seed"] = report.single_seed;
  doc["rmse_normalized"] = {{"mean", to_std(report.normalized.mean)},
                            {"standard_error", to_std(report.normalized.standard_error)}};
  doc["rmse"] = {{"mean", to_std(report.original.mean)},
                 {"standard_error", to_std(report.original.standard_error)}};
  return doc.dump(2);
}

std::string report_table(const EvalReport& report) {
  const auto& c = report.config;
  std::ostringstream out;
  out << report.config.name << ": " << to_string(c.model.kind) << "-" << to_string(c.model.state.mode);
  if (c.model.kind == ModelKind::XFode) out << "-" << to_string(c.model.strategy);
  out << "  (m=" << c.model.state.order << ", P=" << c.model.rules << ", N=" << c.horizon
      << ", #LP=" << report.parameter_count << ")\n";
  out << std::fixed << std::setprecision(4);
  out << "  seed    rmse(norm)   rmse(orig)   train L1\n";
  for (const auto& s : report.seeds) {
    out << "  " << std::setw(4) << s.seed << "  ";
    if (s.diverged) {
      out << "diverged\n";
      continue;
    }
    for (Eigen::Index o = 0; o < s.rmse_normalized.size(); ++o) {
      out << std::setw(11) << s.rmse_normalized(o) << "  " << std::setw(11) << s.rmse_original(o) << "  ";
    }
    out << std::setw(9) << s.train_loss << "\n";
  }
  for (Eigen::Index o = 0; o < report.normalized.mean.size(); ++o) {
    out << "  y" << (o + 1) << ": " << report.original.mean(o) << " +/- (" << report.original.standard_error(o)
        << ")  normalized " << report.normalized.mean(o) << " +/- (" << report.normalized.standard_error(o) << ")\n";
  }
  if (report.diverged_seeds > 0) out << "  " << report.diverged_seeds << " diverged seed(s) excluded\n";
  if (report.single_seed) out << "  single seed: standard error reported as 0\n";
  return out.str();
}

std::vector<DimensionName> dimension_names(const ModelSpec& spec) {
  std::vector<DimensionName> names;
  for (int j = 0; j <= spec.state.order; ++j) {
    for (int c = 0; c < spec.n_y; ++c) {
      const std::string y = "y" + std::to_string(c + 1);
      std::string symbol;
      if (spec.state.mode == StateMode::Lagged) {
        symbol = j == 0 ? y + "[k]" : y + "[k-" + std::to_string(j) + "]";
      } else {
        symbol = j == 0 ? y : (j == 1 ? "d" + y : "d" + std::to_string(j) + y);
      }
      names.push_back({symbol, describe_state(spec.state.mode, j, c)});
    }
  }
  for (int c = 0; c < spec.n_u; ++c) names.push_back({"u" + std::to_string(c + 1), "control input"});
  return names;
}

std::vector<std::filesystem::path> export_mfs(const Model& model, const std::filesystem::path& out_dir, int points) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  const auto names = dimension_names(model.spec());
  std::vector<std::filesystem::path> written;
  json manifest;
  manifest["model_kind"] = to_string(model.spec().kind);
  manifest["strategy"] = to_string(model.spec().antecedent());
  manifest["P"] = model.spec().rules;
  manifest["points"] = points;
  json dims = json::array();

  for (int i = 0; i < model.n_z(); ++i) {
    DecodedMFs mfs;
    if (model.is_additive()) {
      mfs = model.additive().blocks()[i].mfs();
    } else {
      const auto& f = model.fode();
      mfs.strategy = Strategy::FreeGauss;
      mfs.rules = f.rules();
      for (int p = 0; p < f.rules(); ++p) {
        mfs.centers.push_back(f.center(p, i));
        mfs.left_spreads.push_back(f.sigma(p, i));
        mfs.right_spreads.push_back(f.sigma(p, i));
      }
    }
    const std::string file = "mf_z" + std::to_string(i + 1) + ".csv";
    write_mf_csv(mfs, out_dir / file, points);
    written.push_back(out_dir / file);
    dims.push_back({{"dimension", "z" + std::to_string(i + 1)},
                    {"symbol", names[i].symbol},
                    {"description", names[i].description},
                    {"file", file},
                    {"centers", mfs.centers}});
  }
  manifest["dimensions"] = std::move(dims);

  const auto manifest_path = out_dir / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + manifest_path.string());
  out << manifest.dump(2) << '\n';
  written.push_back(manifest_path);
  return written;
}

}  // namespace xfode
