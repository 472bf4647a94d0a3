// airfer: simulator and calibration toolkit for private collaborative
// classification over a fading multiple-access channel.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airfer/commands.hpp"

namespace {

std::vector<double> split_doubles(const std::string& csv,
                                  const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "no values given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"over-the-air collaborative inference simulator"};
  app.require_subcommand(1);

  std::string eps_csv;
  std::string p_csv = "1.0";
  airfer::cli::CalibrateArgs cal;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "print the privacy calibration table");
  calibrate->add_option("--eps", eps_csv, "target epsilon values (comma list)")
      ->required();
  calibrate->add_option("--delta", cal.delta, "target delta")
      ->capture_default_str();
  calibrate->add_option("--p", p_csv, "participation probabilities (comma list)")
      ->capture_default_str();
  calibrate->add_option("--n", cal.n, "client count")->capture_default_str();
  calibrate->add_option("--sensitivity", cal.sensitivity,
                        "L2 sensitivity (default sqrt 2)");

  std::string sim_config;
  CLI::App* simulate =
      app.add_subcommand("simulate", "run the configured experiment grid");
  simulate->add_option("--config", sim_config, "experiment config (JSON)")
      ->required();

  std::string sweep_config;
  std::string sweep_axis;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run the grid one axis value at a time");
  sweep->add_option("--config", sweep_config, "experiment config (JSON)")
      ->required();
  sweep->add_option("--axis", sweep_axis, "axis: snr_db, p, d, epsilon or n")
      ->required();

  std::vector<std::string> report_paths;
  double alpha = 0.05;
  CLI::App* report = app.add_subcommand(
      "report", "rank methods across results files (Friedman + Nemenyi)");
  report->add_option("results", report_paths, "results.csv paths")
      ->required()
      ->expected(-1);
  report->add_option("--alpha", alpha, "significance level (0.05 or 0.10)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (calibrate->parsed()) {
      cal.epsilons = split_doubles(eps_csv, "--eps");
      cal.ps = split_doubles(p_csv, "--p");
      return airfer::cli::cmd_calibrate(cal);
    }
    if (simulate->parsed()) return airfer::cli::cmd_simulate(sim_config);
    if (sweep->parsed()) return airfer::cli::cmd_sweep(sweep_config, sweep_axis);
    if (report->parsed()) return airfer::cli::cmd_report(report_paths, alpha);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
