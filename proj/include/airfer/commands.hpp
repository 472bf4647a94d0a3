#pragma once

#include <string>
#include <vector>

namespace airfer::cli {

// Command implementations behind the CLI verbs. Each returns a process exit
// code: 0 success, 2 usage/config problem, 1 runtime failure.

struct CalibrateArgs {
  std::vector<double> epsilons;
  double delta = 1e-5;
  std::vector<double> ps{1.0};
  int n = 20;
  double sensitivity = 0.0;  // 0: default sqrt(2)
};

int cmd_calibrate(const CalibrateArgs& args);
int cmd_simulate(const std::string& config_path);
int cmd_sweep(const std::string& config_path, const std::string& axis);
int cmd_report(const std::vector<std::string>& results_paths, double alpha);

}  // namespace airfer::cli
