#include "hagerlab/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hagerlab {

using nlohmann::json;

namespace {

DeltaSpec parse_delta(const json& doc) {
  const bool has_delta = doc.contains("delta");
  const bool has_eps = doc.contains("epsilon0");
  if (has_delta == has_eps)
    throw Error(ErrorCode::ConfigError,
                "exactly one of \"delta\" and \"epsilon0\" must be given");
  DeltaSpec spec;
  if (has_eps) {
    spec.kind = DeltaSpec::Kind::epsilon0;
    spec.value = doc.at("epsilon0").get<double>();
    return spec;
  }
  const json& d = doc.at("delta");
  if (d.is_string()) {
    if (d.get<std::string>() != "exp(-1/h)")
      throw Error(ErrorCode::ConfigError,
                  "field \"delta\": expected a number or the string \"exp(-1/h)\"");
    spec.kind = DeltaSpec::Kind::exp_inv_h;
  } else {
    spec.kind = DeltaSpec::Kind::literal;
    spec.value = d.get<double>();
  }
  return spec;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }

  ExperimentConfig cfg;
  try {
    if (doc.contains("symbol")) {
      cfg.symbol_triples.clear();
      for (const json& triple : doc.at("symbol")) {
        if (!triple.is_array() || triple.size() != 3)
          throw Error(ErrorCode::ConfigError,
                      "field \"symbol\": entries must be [m, re, im] triples");
        cfg.symbol_triples.emplace_back(triple.at(0).get<int>(), triple.at(1).get<double>(),
                                        triple.at(2).get<double>());
      }
    }
    if (doc.contains("h")) cfg.h = doc.at("h").get<double>();
    cfg.delta = parse_delta(doc);
    if (doc.contains("n")) cfg.n_trunc = doc.at("n").get<int>();
    if (doc.contains("trials")) cfg.trials = doc.at("trials").get<int>();
    if (doc.contains("box")) {
      const json& b = doc.at("box");
      if (!b.is_array() || b.size() != 4)
        throw Error(ErrorCode::ConfigError, "field \"box\": expected [re0, re1, im0, im1]");
      cfg.box = Box{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                    b.at(3).get<double>()};
    }
    if (doc.contains("bins")) cfg.bins = doc.at("bins").get<int>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<uint64_t>();
    if (doc.contains("gaussian_scale"))
      cfg.gaussian_scale = doc.at("gaussian_scale").get<double>();
    if (doc.contains("retain_eigenvalues"))
      cfg.retain_eigenvalues = doc.at("retain_eigenvalues").get<bool>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json doc;
  json symbol = json::array();
  for (const auto& [m, re, im] : cfg.symbol_triples) symbol.push_back({m, re, im});
  doc["symbol"] = symbol;
  doc["h"] = cfg.h;
  switch (cfg.delta.kind) {
    case DeltaSpec::Kind::literal: doc["delta"] = cfg.delta.value; break;
    case DeltaSpec::Kind::exp_inv_h: doc["delta"] = "exp(-1/h)"; break;
    case DeltaSpec::Kind::epsilon0: doc["epsilon0"] = cfg.delta.value; break;
  }
  doc["n"] = cfg.n_trunc;
  doc["trials"] = cfg.trials;
  doc["box"] = {cfg.box.re0, cfg.box.re1, cfg.box.im0, cfg.box.im1};
  doc["bins"] = cfg.bins;
  doc["seed"] = cfg.seed;
  doc["gaussian_scale"] = cfg.gaussian_scale;
  doc["retain_eigenvalues"] = cfg.retain_eigenvalues;
  return doc.dump(2);
}

}  // namespace hagerlab
