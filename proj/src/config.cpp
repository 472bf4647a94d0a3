#include "airfer/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace airfer::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path, what);
}

double parse_epsilon_entry(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    fail(path, "expected a number or \"inf\"");
  }
  if (!v.is_number()) fail(path, "expected a number or \"inf\"");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& path,
                                bool allow_inf = false) {
  std::vector<double> out;
  const auto one = [&](const json& e, const std::string& p) {
    if (allow_inf) return parse_epsilon_entry(e, p);
    if (!e.is_number()) fail(p, "expected a number");
    return e.get<double>();
  };
  if (v.is_array()) {
    if (v.empty()) fail(path, "list must not be empty");
    for (size_t i = 0; i < v.size(); ++i) {
      out.push_back(one(v[i], path + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(one(v, path));
  }
  return out;
}

fusion::Method parse_method(const std::string& name, const std::string& path) {
  if (name == "ba") return fusion::Method::kBa;
  if (name == "wba") return fusion::Method::kWba;
  if (name == "mv") return fusion::Method::kMv;
  fail(path, "unknown method '" + name + "' (expected ba, wba or mv)");
}

pipeline::Scheme parse_scheme(const std::string& name,
                              const std::string& path) {
  if (name == "oac") return pipeline::Scheme::kOac;
  if (name == "orthogonal") return pipeline::Scheme::kOrthogonal;
  if (name == "best_client") return pipeline::Scheme::kBestClient;
  if (name == "rr_oac") return pipeline::Scheme::kRrOac;
  if (name == "rr_orthogonal") return pipeline::Scheme::kRrOrthogonal;
  fail(path, "unknown scheme '" + name + "'");
}

projection::Kind parse_projection_kind(const std::string& name,
                                       const std::string& path) {
  if (name == "orthogonal") return projection::Kind::kOrthogonal;
  if (name == "gaussian") return projection::Kind::kGaussian;
  if (name == "rademacher") return projection::Kind::kRademacher;
  if (name == "identity") return projection::Kind::kIdentity;
  fail(path, "unknown projection kind '" + name + "'");
}

std::string method_name(fusion::Method m) {
  switch (m) {
    case fusion::Method::kBa:
      return "ba";
    case fusion::Method::kWba:
      return "wba";
    case fusion::Method::kMv:
      return "mv";
  }
  return "?";
}

std::string scheme_name(pipeline::Scheme s) {
  switch (s) {
    case pipeline::Scheme::kOac:
      return "oac";
    case pipeline::Scheme::kOrthogonal:
      return "orthogonal";
    case pipeline::Scheme::kBestClient:
      return "best_client";
    case pipeline::Scheme::kRrOac:
      return "rr_oac";
    case pipeline::Scheme::kRrOrthogonal:
      return "rr_orthogonal";
  }
  return "?";
}

std::string projection_kind_name(projection::Kind k) {
  switch (k) {
    case projection::Kind::kOrthogonal:
      return "orthogonal";
    case projection::Kind::kGaussian:
      return "gaussian";
    case projection::Kind::kRademacher:
      return "rademacher";
    case projection::Kind::kIdentity:
      return "identity";
  }
  return "?";
}

}  // namespace

ExperimentConfig parse_config_json(const json& doc) {
  if (!doc.is_object()) fail("", "top-level config must be a JSON object");
  ExperimentConfig config;

  if (!doc.contains("dataset")) fail("dataset", "required key missing");
  const json& ds = doc["dataset"];
  if (ds.contains("synthetic")) {
    const json& syn = ds["synthetic"];
    data::SyntheticSpec spec;
    if (syn.contains("n")) spec.n = syn["n"].get<int>();
    if (syn.contains("k")) spec.k = syn["k"].get<int>();
    if (syn.contains("num_samples")) {
      spec.num_samples = syn["num_samples"].get<int>();
    }
    if (syn.contains("client_accuracy")) {
      spec.client_accuracy = syn["client_accuracy"].get<double>();
    }
    if (syn.contains("dirichlet_blend")) {
      spec.dirichlet_blend = syn["dirichlet_blend"].get<double>();
    }
    if (syn.contains("seed")) spec.seed = syn["seed"].get<uint64_t>();
    if (spec.k < 2) fail("dataset.synthetic.k", "must be >= 2");
    if (spec.n < 1) fail("dataset.synthetic.n", "must be >= 1");
    if (spec.num_samples < 10) fail("dataset.synthetic.num_samples", "must be >= 10");
    if (!(spec.client_accuracy > 0.0 && spec.client_accuracy < 1.0)) {
      fail("dataset.synthetic.client_accuracy", "must lie in (0, 1)");
    }
    if (spec.dirichlet_blend < 0.0 || spec.dirichlet_blend > 1.0) {
      fail("dataset.synthetic.dirichlet_blend", "must lie in [0, 1]");
    }
    config.dataset.synthetic = spec;
  } else if (ds.contains("scores_path")) {
    config.dataset.scores_path = ds["scores_path"].get<std::string>();
  } else {
    fail("dataset", "needs either 'synthetic' or 'scores_path'");
  }

  eval::GridConfig& grid = config.grid;
  if (doc.contains("methods") || doc.contains("method")) {
    const json& m = doc.contains("methods") ? doc["methods"] : doc["method"];
    grid.methods.clear();
    if (m.is_array()) {
      if (m.empty()) fail("methods", "list must not be empty");
      for (size_t i = 0; i < m.size(); ++i) {
        grid.methods.push_back(parse_method(
            m[i].get<std::string>(), "methods[" + std::to_string(i) + "]"));
      }
    } else {
      grid.methods.push_back(parse_method(m.get<std::string>(), "method"));
    }
  }
  if (doc.contains("schemes") || doc.contains("scheme")) {
    const json& s = doc.contains("schemes") ? doc["schemes"] : doc["scheme"];
    grid.schemes.clear();
    if (s.is_array()) {
      if (s.empty()) fail("schemes", "list must not be empty");
      for (size_t i = 0; i < s.size(); ++i) {
        grid.schemes.push_back(parse_scheme(
            s[i].get<std::string>(), "schemes[" + std::to_string(i) + "]"));
      }
    } else {
      grid.schemes.push_back(parse_scheme(s.get<std::string>(), "scheme"));
    }
  }
  for (pipeline::Scheme scheme : grid.schemes) {
    if (scheme == pipeline::Scheme::kRrOac ||
        scheme == pipeline::Scheme::kRrOrthogonal) {
      const bool has_mv =
          std::find(grid.methods.begin(), grid.methods.end(),
                    fusion::Method::kMv) != grid.methods.end();
      if (!has_mv) {
        fail("schemes", "randomized-response schemes require method 'mv'");
      }
    }
  }

  if (doc.contains("epsilon")) {
    grid.epsilons = number_list(doc["epsilon"], "epsilon", /*allow_inf=*/true);
    for (size_t i = 0; i < grid.epsilons.size(); ++i) {
      if (!std::isinf(grid.epsilons[i]) && grid.epsilons[i] <= 0.0) {
        fail("epsilon[" + std::to_string(i) + "]", "must be > 0 or \"inf\"");
      }
    }
  }
  if (doc.contains("delta")) {
    grid.delta_target = doc["delta"].get<double>();
    if (!(grid.delta_target > 0.0 && grid.delta_target < 1.0)) {
      fail("delta", "must lie in (0, 1)");
    }
  }
  if (doc.contains("sensitivity")) {
    grid.sensitivity = doc["sensitivity"].get<double>();
    if (!(grid.sensitivity > 0.0)) fail("sensitivity", "must be > 0");
  }
  if (doc.contains("p")) {
    grid.ps = number_list(doc["p"], "p");
    for (size_t i = 0; i < grid.ps.size(); ++i) {
      if (!(grid.ps[i] > 0.0 && grid.ps[i] <= 1.0)) {
        fail("p[" + std::to_string(i) + "]", "must lie in (0, 1]");
      }
    }
  }
  if (doc.contains("d")) {
    grid.ds.clear();
    for (double v : number_list(doc["d"], "d")) {
      if (v < 1.0 || v != std::floor(v)) fail("d", "entries must be integers >= 1");
      grid.ds.push_back(static_cast<int>(v));
    }
  }
  if (doc.contains("snr_db")) grid.snr_dbs = number_list(doc["snr_db"], "snr_db");
  if (doc.contains("seeds")) {
    grid.seeds.clear();
    const json& seeds = doc["seeds"];
    if (!seeds.is_array() || seeds.empty()) {
      fail("seeds", "must be a non-empty list");
    }
    for (const json& s : seeds) grid.seeds.push_back(s.get<uint64_t>());
  }
  if (doc.contains("noise_placement")) {
    const std::string np = doc["noise_placement"].get<std::string>();
    if (np == "before_projection") {
      grid.noise_placement = pipeline::NoisePlacement::kBeforeProjection;
    } else if (np == "after_projection") {
      grid.noise_placement = pipeline::NoisePlacement::kAfterProjection;
    } else {
      fail("noise_placement",
           "expected 'before_projection' or 'after_projection'");
    }
  }
  if (doc.contains("projection")) {
    const json& proj = doc["projection"];
    if (proj.contains("kind")) {
      grid.projection_kind = parse_projection_kind(
          proj["kind"].get<std::string>(), "projection.kind");
    }
    if (proj.contains("seed")) {
      grid.projection_seed = proj["seed"].get<uint64_t>();
    }
    if (proj.contains("d") && grid.ds.empty()) {
      grid.ds.push_back(proj["d"].get<int>());
    }
  }
  if (doc.contains("channel")) {
    const json& ch = doc["channel"];
    if (ch.contains("sigma_h")) grid.fading.sigma_h = ch["sigma_h"].get<double>();
    if (ch.contains("h_min")) grid.fading.h_min = ch["h_min"].get<double>();
    if (ch.contains("power")) grid.power = ch["power"].get<double>();
    if (!(grid.fading.sigma_h > 0.0)) fail("channel.sigma_h", "must be > 0");
    if (!(grid.fading.h_min > 0.0)) {
      fail("channel.h_min", "must be > 0 (inverse-gain moment diverges at 0)");
    }
    if (!(grid.power > 0.0)) fail("channel.power", "must be > 0");
  }
  if (doc.contains("master_seed")) {
    grid.master_seed = doc["master_seed"].get<uint64_t>();
  }
  if (doc.contains("n")) {
    for (double v : number_list(doc["n"], "n")) {
      if (v < 1.0 || v != std::floor(v)) fail("n", "entries must be integers >= 1");
      config.n_axis.push_back(static_cast<int>(v));
    }
  }
  if (doc.contains("output_dir")) {
    config.output_dir = doc["output_dir"].get<std::string>();
    if (config.output_dir.empty()) fail("output_dir", "must not be empty");
  }

  // identity projection can only serve d == k arms
  if (grid.projection_kind == projection::Kind::kIdentity &&
      config.dataset.synthetic.has_value() && !grid.ds.empty()) {
    for (int d : grid.ds) {
      if (d != config.dataset.synthetic->k) {
        fail("projection.kind", "identity projection requires every d == k");
      }
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_config_json(doc);
}

nlohmann::ordered_json normalize_config(const ExperimentConfig& config) {
  nlohmann::ordered_json doc;
  if (config.dataset.synthetic.has_value()) {
    const data::SyntheticSpec& s = *config.dataset.synthetic;
    doc["dataset"]["synthetic"] = {
        {"n", s.n},
        {"k", s.k},
        {"num_samples", s.num_samples},
        {"client_accuracy", s.client_accuracy},
        {"dirichlet_blend", s.dirichlet_blend},
        {"seed", s.seed}};
  } else {
    doc["dataset"]["scores_path"] = *config.dataset.scores_path;
  }
  const eval::GridConfig& grid = config.grid;
  doc["methods"] = nlohmann::ordered_json::array();
  for (fusion::Method m : grid.methods) doc["methods"].push_back(method_name(m));
  doc["schemes"] = nlohmann::ordered_json::array();
  for (pipeline::Scheme s : grid.schemes) {
    doc["schemes"].push_back(scheme_name(s));
  }
  doc["epsilon"] = nlohmann::ordered_json::array();
  for (double e : grid.epsilons) {
    if (std::isinf(e)) {
      doc["epsilon"].push_back("inf");
    } else {
      doc["epsilon"].push_back(e);
    }
  }
  doc["delta"] = grid.delta_target;
  doc["sensitivity"] = grid.sensitivity;
  doc["p"] = grid.ps;
  if (!grid.ds.empty()) doc["d"] = grid.ds;
  if (!config.n_axis.empty()) doc["n"] = config.n_axis;
  doc["snr_db"] = grid.snr_dbs;
  doc["seeds"] = grid.seeds;
  doc["noise_placement"] =
      grid.noise_placement == pipeline::NoisePlacement::kBeforeProjection
          ? "before_projection"
          : "after_projection";
  doc["projection"] = {{"kind", projection_kind_name(grid.projection_kind)},
                       {"seed", grid.projection_seed}};
  doc["channel"] = {{"sigma_h", grid.fading.sigma_h},
                    {"h_min", grid.fading.h_min},
                    {"power", grid.power}};
  doc["master_seed"] = grid.master_seed;
  doc["output_dir"] = config.output_dir;
  return doc;
}

data::Dataset load_dataset(const ExperimentConfig& config) {
  if (config.dataset.synthetic.has_value()) {
    return data::generate_synthetic(*config.dataset.synthetic);
  }
  return data::load_scores(*config.dataset.scores_path);
}

}  // namespace airfer::cli
