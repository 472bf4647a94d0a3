#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "airfer/data.hpp"
#include "airfer/eval.hpp"

namespace airfer::cli {

/// Configuration problem, carrying the offending key path. Mapped to exit
/// code 2 by the command layer.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error("config error at '" + key_path + "': " + what),
        key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

struct DatasetConfig {
  std::optional<data::SyntheticSpec> synthetic;
  std::optional<std::string> scores_path;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  eval::GridConfig grid;
  std::vector<int> n_axis;  // only used by `sweep --axis n` (synthetic data)
  std::string output_dir = "out";
};

ExperimentConfig parse_config_json(const nlohmann::json& doc);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical JSON form; parse(normalize(parse(file))) == parse(file) and the
/// normalized serialization is byte-stable.
nlohmann::ordered_json normalize_config(const ExperimentConfig& config);

data::Dataset load_dataset(const ExperimentConfig& config);

}  // namespace airfer::cli
