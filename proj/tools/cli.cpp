#include "cli.hpp"

#include "xfode/error.hpp"
#include "xfode/evaluation.hpp"
#include "xfode/experiment.hpp"
#include "xfode/model_io.hpp"
#include "xfode/rollout.hpp"
#include "xfode/synthetic.hpp"
#include "xfode/training.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>

namespace xfode::cli {
namespace {

const std::vector<std::string> kTrainKeys = {"data", "nu",  "ny",     "train-rows", "model", "ps",
                                             "sr",   "m",   "rules",  "rollout",    "stride", "epochs",
                                             "mbs",  "lr",  "clip",   "beta1",      "beta2",  "adam-eps"};

/// Flags backed by the experiment option table, so config files and the
/// command line share one set of names and help strings.
class TableOptions {
 public:
  void add(CLI::App* cmd, const std::vector<std::string>& keys) {
    for (const auto& doc : experiment_options()) {
      if (!keys.empty() && std::find(keys.begin(), keys.end(), doc.key) == keys.end()) continue;
      auto* opt = cmd->add_option("--" + doc.key, values_[doc.key], doc.help);
      if (!doc.default_value.empty()) opt->default_str(doc.default_value);
      options_.emplace_back(doc.key, opt);
    }
  }

  CLI::Option* option(const std::string& key) const {
    for (const auto& [k, opt] : options_) {
      if (k == key) return opt;
    }
    return nullptr;
  }

  void apply(ExperimentSpec& spec) const {
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) apply_option(spec, key, values_.at(key));
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

void write_simulation(const Model& model, const RawDataset& raw, const Simulation& sim, std::ostream& out) {
  const int n_y = model.spec().n_y;
  const int n_u = model.spec().n_u;
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n_y);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(n_y);
  if (model.norm().channels() == n_u + n_y) {
    scale = output_std(model.norm(), n_u);
    shift = output_mean(model.norm(), n_u);
  }
  out << "k";
  for (int o = 0; o < n_y; ++o) out << ",y_true_" << (o + 1);
  for (int o = 0; o < n_y; ++o) out << ",y_pred_" << (o + 1);
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index r = 0; r < sim.predicted.rows(); ++r) {
    const auto k = static_cast<Eigen::Index>(sim.offset) + r;
    out << k;
    for (int o = 0; o < n_y; ++o) out << ',' << raw.outputs(k, o);
    for (int o = 0; o < n_y; ++o) out << ',' << sim.predicted(r, o) * scale(o) + shift(o);
    out << '\n';
  }
}

void write_contributions(const Model& model, const Simulation& sim, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "k";
  for (int i = 0; i < model.n_z(); ++i) {
    for (int o = 0; o < model.n_x(); ++o) out << ",d_z" << (i + 1) << "_x" << (o + 1);
  }
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t s = 0; s < sim.contributions.size(); ++s) {
    out << sim.offset + s;
    const auto& c = sim.contributions[s];
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index o = 0; o < c.cols(); ++o) out << ',' << c(i, o);
    }
    out << '\n';
  }
}

RawDataset normalize_for(const Model& model, const RawDataset& raw) {
  if (model.norm().channels() == 0) return raw;
  return normalize(raw, model.norm());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"xfode: interpretable additive fuzzy ODE models for system identification", "xfode"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model on a CSV record and write it as JSON");
  TableOptions train_opts;
  train_opts.add(train_cmd, kTrainKeys);
  train_opts.option("data")->required();
  std::uint64_t seed = 1;
  std::string model_out;
  bool quiet = false;
  train_cmd->add_option("--seed", seed, "Initialization and shuffling seed")->default_str("1");
  train_cmd->add_option("--out", model_out, "Output model file (JSON)")->required();
  train_cmd->add_flag("--quiet", quiet, "Suppress the per-epoch progress log");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Free-run a trained model over a CSV record");
  std::string sim_model, sim_data, sim_out, dump_path;
  sim_cmd->add_option("--model", sim_model, "Model file (JSON)")->required();
  sim_cmd->add_option("--data", sim_data, "CSV record in original units")->required();
  sim_cmd->add_option("--out", sim_out, "Output CSV (default: stdout)");
  sim_cmd->add_option("--dump-contributions", dump_path, "Write per-step block contributions to this CSV");

  // benchmark
  auto* bench_cmd = app.add_subcommand("benchmark", "Train and evaluate over a list of seeds");
  TableOptions bench_opts;
  bench_opts.add(bench_cmd, {});
  std::string config_path, json_path;
  unsigned threads = 0;
  bench_cmd->add_option("--config", config_path, "Experiment file of key = value lines; flags override it");
  bench_cmd->add_option("--json", json_path, "Write the machine-readable report here");
  bench_cmd->add_option("--threads", threads, "Parallel seeds (default: XFODE_THREADS or all cores)");

  // export-mfs
  auto* export_cmd = app.add_subcommand("export-mfs", "Sample every membership function to CSV");
  std::string export_model, export_dir;
  int points = 501;
  export_cmd->add_option("--model", export_model, "Model file (JSON)")->required();
  export_cmd->add_option("--out-dir", export_dir, "Output directory")->required();
  export_cmd->add_option("--points", points, "Grid points per dimension")->default_str("501");

  // gen-data
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic benchmark record");
  std::string kind = "tank_like", gen_out;
  std::size_t samples = 3000;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--kind", kind, "tank_like | damper_like | fuzzy_ground_truth")->default_str("tank_like");
  gen_cmd->add_option("--n", samples, "Number of samples (>= 100)")->default_str("3000");
  gen_cmd->add_option("--seed", gen_seed, "Generator seed")->default_str("1");
  gen_cmd->add_option("--out", gen_out, "Output CSV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return 1;
  }

  try {
    if (train_cmd->parsed()) {
      ExperimentSpec spec;
      train_opts.apply(spec);
      spec.model.n_u = spec.n_u;
      spec.model.n_y = spec.n_y;
      const auto raw = load_csv(spec.data_path, spec.n_u, spec.n_y);
      const std::size_t rows = spec.train_rows == 0 ? raw.sample_count() : spec.train_rows;
      RawDataset train_raw = raw;
      if (rows < raw.sample_count()) train_raw = split_rows(raw, rows).first;
      const auto stats = fit_normalizer(train_raw);
      const auto train_set = build_trajectories(normalize(train_raw, stats), spec.model.state, spec.horizon,
                                                spec.stride);
      Model model = make_model(spec.model, input_domains(train_set), seed);
      model.set_norm(stats);
      auto cfg = spec.train_config(seed);
      if (!quiet) {
        cfg.on_epoch = [&err](const EpochReport& r) {
          err << "epoch " << r.epoch << " loss " << r.mean_loss << " skipped " << r.skipped_batches << '\n';
        };
      }
      const auto run = train(model, train_set, cfg);
      save_model(model, model_out);
      out << "trained " << to_string(spec.model.kind) << " with " << model.parameter_count()
          << " parameters on " << train_set.size() << " trajectories; best L1 " << run.best_loss << " at epoch "
          << run.best_epoch << "; wrote " << model_out << '\n';
      return 0;
    }

    if (sim_cmd->parsed()) {
      const Model model = load_model(sim_model);
      const auto raw = load_csv(sim_data, model.spec().n_u, model.spec().n_y);
      const auto sim = simulate(model, normalize_for(model, raw), !dump_path.empty());
      if (sim_out.empty()) {
        write_simulation(model, raw, sim, out);
      } else {
        std::ofstream file(sim_out);
        if (!file) throw Error(ErrorCode::IoError, "cannot write " + sim_out);
        write_simulation(model, raw, sim, file);
      }
      if (!dump_path.empty()) write_contributions(model, sim, dump_path);
      return 0;
    }

    if (bench_cmd->parsed()) {
      ExperimentSpec spec;
      if (!config_path.empty()) spec = load_experiment(config_path);
      bench_opts.apply(spec);
      const auto report = benchmark(spec, threads);
      out << report_table(report);
      if (!json_path.empty()) {
        std::ofstream file(json_path);
        if (!file) throw Error(ErrorCode::IoError, "cannot write " + json_path);
        file << report_json(report) << '\n';
      }
      return 0;
    }

    if (export_cmd->parsed()) {
      const auto written = export_mfs(load_model(export_model), export_dir, points);
      for (const auto& p : written) out << p.string() << '\n';
      return 0;
    }

    if (gen_cmd->parsed()) {
      const auto ds = generate_synthetic(parse_synthetic_kind(kind), samples, gen_seed);
      save_csv(ds, gen_out);
      out << "wrote " << ds.sample_count() << " samples to " << gen_out << '\n';
      return 0;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) {
      err << e.what() << '\n';
      return 1;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace xfode::cli
