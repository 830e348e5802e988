#include "xfode/model_io.hpp"

#include "xfode/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace xfode {
namespace {

using nlohmann::json;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string model_to_json(const Model& model) {
  const auto& spec = model.spec();
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["model_kind"] = to_string(spec.kind);
  doc["strategy"] = to_string(spec.antecedent());
  doc["P"] = spec.rules;
  doc["n_u"] = spec.n_u;
  doc["n_y"] = spec.n_y;
  doc["m"] = spec.state.order;
  doc["sr_mode"] = to_string(spec.state.mode);
  doc["norm_stats"] = {{"mean", to_std(model.norm().mean)}, {"std", to_std(model.norm().std)}};

  json blocks = json::array();
  if (model.is_additive()) {
    for (const auto& b : model.additive().blocks()) {
      const auto cons = b.consequents();
      blocks.push_back({{"raw_chain_params", b.chain().raw},
                        {"consequents", std::vector<double>(cons.begin(), cons.end())}});
    }
  } else {
    const auto& f = model.fode();
    const auto params = f.parameters();
    const auto antecedent = static_cast<std::size_t>(2 * f.n_z());
    for (int p = 0; p < f.rules(); ++p) {
      const auto rule = params.subspan(static_cast<std::size_t>(p) * f.rule_size(), f.rule_size());
      blocks.push_back({{"raw_chain_params", std::vector<double>(rule.begin(), rule.begin() + antecedent)},
                        {"consequents", std::vector<double>(rule.begin() + antecedent, rule.end())}});
    }
  }
  doc["blocks"] = std::move(blocks);
  doc["metadata"] = {{"seed", model.metadata().seed},
                     {"epochs", model.metadata().epochs},
                     {"final_loss", model.metadata().final_loss}};
  return doc.dump(2);
}

Model model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidModelFile, e.what());
  }

  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::InvalidModelFile, "unsupported format_version");
    }
    ModelSpec spec;
    spec.kind = parse_model_kind(doc.at("model_kind").get<std::string>());
    spec.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    spec.rules = doc.at("P").get<int>();
    spec.n_u = doc.at("n_u").get<int>();
    spec.n_y = doc.at("n_y").get<int>();
    spec.state.order = doc.at("m").get<int>();
    spec.state.mode = parse_state_mode(doc.at("sr_mode").get<std::string>());
    if (spec.kind != ModelKind::XFode) spec.strategy = Strategy::FreeGauss;

    NormStats norm;
    norm.mean = to_eigen(doc.at("norm_stats").at("mean").get<std::vector<double>>());
    norm.std = to_eigen(doc.at("norm_stats").at("std").get<std::vector<double>>());

    const auto& blocks = doc.at("blocks");
    std::optional<Model> model;
    if (spec.kind == ModelKind::Fode) {
      std::vector<double> params;
      for (const auto& b : blocks) {
        for (double v : b.at("raw_chain_params").get<std::vector<double>>()) params.push_back(v);
        for (double v : b.at("consequents").get<std::vector<double>>()) params.push_back(v);
      }
      model.emplace(spec, FodeDynamics(spec.rules, spec.n_x(), spec.n_u, std::move(params)), norm);
    } else {
      std::vector<SingleInputFls> fls;
      for (const auto& b : blocks) {
        AntecedentChain chain{spec.antecedent(), spec.rules, b.at("raw_chain_params").get<std::vector<double>>()};
        fls.emplace_back(std::move(chain), spec.n_x(), b.at("consequents").get<std::vector<double>>());
      }
      model.emplace(spec, AdditiveDynamics(std::move(fls), spec.n_x(), spec.n_u), norm);
    }

    if (doc.contains("metadata")) {
      const auto& meta = doc.at("metadata");
      model->metadata().seed = meta.value("seed", std::uint64_t{0});
      model->metadata().epochs = meta.value("epochs", 0);
      model->metadata().final_loss = meta.value("final_loss", 0.0);
    }
    return std::move(*model);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidModelFile, e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed while writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace xfode
