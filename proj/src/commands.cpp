#include "airfer/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "airfer/config.hpp"
#include "airfer/privacy.hpp"

namespace airfer::cli {
namespace {

int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
      dynamic_cast<const std::invalid_argument*>(&e) != nullptr) {
    return 2;
  }
  return 1;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void check_projection_fits(const ExperimentConfig& config,
                           const data::Dataset& dataset) {
  if (config.grid.projection_kind != projection::Kind::kIdentity) return;
  std::vector<int> ds = config.grid.ds;
  if (ds.empty()) ds.push_back(dataset.k);
  for (int d : ds) {
    if (d != dataset.k) {
      throw ConfigError("projection.kind",
                        "identity projection requires d == k = " +
                            std::to_string(dataset.k));
    }
  }
}

void write_outputs(const eval::ExperimentResult& result,
                   const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);
  eval::write_results_csv(result, output_dir + "/results.csv");
  eval::write_summary_json(result, output_dir + "/summary.json");
  for (const auto& [label, summary] : eval::summarize(result)) {
    std::printf("%-60s  %.4f +- %.4f  (%d seeds)\n", label.c_str(),
                summary.mean, summary.std, summary.count);
  }
}

struct ResultRow {
  std::string label;    // method-scheme
  std::string column;   // file + swept-axis values + seed
  double macro_f1;
};

std::vector<ResultRow> read_results_csv(const std::string& path,
                                        int file_index) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "method,scheme,epsilon,p,d,snr_db,n,seed,macro_f1") {
    throw std::invalid_argument(path + ": not a results.csv (bad header)");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected 9 columns");
    }
    ResultRow row;
    row.label = fields[0] == "best_client" ? "best_client"
                                           : fields[0] + "-" + fields[1];
    row.column = "f" + std::to_string(file_index) + "|" + fields[2] + "|" +
                 fields[3] + "|" + fields[4] + "|" + fields[5] + "|" +
                 fields[6] + "|" + fields[7];
    row.macro_f1 = std::stod(fields[8]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int cmd_calibrate(const CalibrateArgs& args) {
  try {
    if (args.epsilons.empty()) {
      throw ConfigError("--eps", "at least one epsilon is required");
    }
    for (double p : args.ps) {
      if (!(p > 0.0 && p <= 1.0)) {
        throw ConfigError("--p", "participation must lie in (0, 1]");
      }
    }
    if (args.n < 1) throw ConfigError("--n", "client count must be >= 1");
    const double sensitivity = args.sensitivity > 0.0
                                   ? args.sensitivity
                                   : privacy::kDefaultSensitivity;
    std::printf(
        "epsilon_target,delta_target,p,n,base_epsilon,base_delta,sigma_total,"
        "sigma_client_at_full_participation\n");
    for (double eps : args.epsilons) {
      for (double p : args.ps) {
        const privacy::PrivacySpec spec = privacy::amplify_by_sampling(
            privacy::make_budget(eps, args.delta, sensitivity), p, args.n);
        std::printf("%s,%s,%s,%d,%.10g,%.10g,%.10g,%.10g\n", fmt(eps).c_str(),
                    fmt(args.delta).c_str(), fmt(p).c_str(), args.n,
                    spec.base_epsilon, spec.base_delta, spec.sigma_total,
                    spec.sigma_total / std::sqrt(args.n));
      }
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_simulate(const std::string& config_path) {
  try {
    const ExperimentConfig config = parse_config_file(config_path);
    const data::Dataset dataset = load_dataset(config);
    check_projection_fits(config, dataset);
    const eval::ExperimentResult result =
        eval::run_experiment(config.grid, dataset);
    write_outputs(result, config.output_dir);
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_sweep(const std::string& config_path, const std::string& axis) {
  try {
    const ExperimentConfig config = parse_config_file(config_path);
    static const std::set<std::string> kAxes{"snr_db", "p", "d", "epsilon",
                                             "n"};
    if (kAxes.find(axis) == kAxes.end()) {
      throw ConfigError("--axis",
                        "axis must be one of snr_db, p, d, epsilon, n");
    }
    eval::ExperimentResult merged;
    const auto run_block = [&](const eval::GridConfig& grid,
                               const data::Dataset& dataset) {
      eval::ExperimentResult block = eval::run_experiment(grid, dataset);
      merged.records.insert(merged.records.end(), block.records.begin(),
                            block.records.end());
    };

    if (axis == "n") {
      if (!config.dataset.synthetic.has_value()) {
        throw ConfigError("n", "client-count sweeps need a synthetic dataset");
      }
      if (config.n_axis.empty()) {
        throw ConfigError("n", "config must list the client counts to sweep");
      }
      for (int n : config.n_axis) {
        data::SyntheticSpec spec = *config.dataset.synthetic;
        spec.n = n;
        run_block(config.grid, data::generate_synthetic(spec));
      }
    } else {
      const data::Dataset dataset = load_dataset(config);
      check_projection_fits(config, dataset);
      eval::GridConfig grid = config.grid;
      if (axis == "snr_db") {
        for (double v : config.grid.snr_dbs) {
          grid.snr_dbs = {v};
          run_block(grid, dataset);
        }
      } else if (axis == "p") {
        for (double v : config.grid.ps) {
          grid.ps = {v};
          run_block(grid, dataset);
        }
      } else if (axis == "epsilon") {
        for (double v : config.grid.epsilons) {
          grid.epsilons = {v};
          run_block(grid, dataset);
        }
      } else {  // d
        std::vector<int> ds = config.grid.ds;
        if (ds.empty()) ds.push_back(dataset.k);
        for (int v : ds) {
          grid.ds = {v};
          run_block(grid, dataset);
        }
      }
    }
    write_outputs(merged, config.output_dir);
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_report(const std::vector<std::string>& results_paths, double alpha) {
  try {
    if (results_paths.size() < 2) {
      throw ConfigError("report", "need at least two results files");
    }
    std::map<std::string, std::map<std::string, double>> by_label;  // -> column -> f1
    std::set<std::string> columns;
    std::set<std::string> first_labels;
    for (size_t f = 0; f < results_paths.size(); ++f) {
      std::set<std::string> labels;
      for (const ResultRow& row :
           read_results_csv(results_paths[f], static_cast<int>(f))) {
        by_label[row.label][row.column] = row.macro_f1;
        columns.insert(row.column);
        labels.insert(row.label);
      }
      if (f == 0) {
        first_labels = labels;
      } else if (labels != first_labels) {
        throw std::invalid_argument(
            results_paths[f] +
            ": method set differs from the first results file");
      }
    }
    std::vector<std::string> methods(first_labels.begin(), first_labels.end());
    std::vector<std::vector<double>> scores(methods.size());
    for (size_t m = 0; m < methods.size(); ++m) {
      for (const std::string& col : columns) {
        const auto& cells = by_label[methods[m]];
        const auto it = cells.find(col);
        if (it == cells.end()) {
          throw std::invalid_argument("method '" + methods[m] +
                                      "' has no score for column " + col);
        }
        scores[m].push_back(it->second);
      }
    }
    const eval::RankSummary summary = eval::rank_methods(methods, scores, alpha);

    nlohmann::ordered_json doc;
    for (size_t m = 0; m < methods.size(); ++m) {
      doc["avg_ranks"][methods[m]] = summary.avg_ranks[m];
    }
    doc["friedman_stat"] = summary.friedman_stat;
    doc["friedman_critical"] = summary.friedman_critical;
    doc["significant"] = summary.significant;
    doc["cd"] = summary.cd;
    doc["alpha"] = summary.alpha;
    doc["num_columns"] = columns.size();
    doc["indistinguishable_groups"] = summary.indistinguishable_groups;
    // rank-sorted order doubles as the CD-diagram axis data
    std::vector<size_t> order(methods.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return summary.avg_ranks[a] < summary.avg_ranks[b];
    });
    doc["rank_order"] = nlohmann::ordered_json::array();
    for (size_t i : order) doc["rank_order"].push_back(methods[i]);
    std::cout << doc.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

}  // namespace airfer::cli
