#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "airfer/data.hpp"
#include "airfer/pipeline.hpp"

namespace airfer::eval {

/// Unweighted mean of per-class F1 with the 0/0 := 0 convention (a class
/// with no true positives contributes zero).
double macro_f1(const std::vector<int>& preds, const std::vector<int>& labels,
                int k);

/// Per-experiment best client: highest validation Macro-F1 of the client's
/// own argmax predictions; ties go to the lowest client index.
int select_best_client(const data::Dataset& dataset);

struct GridConfig {
  std::vector<fusion::Method> methods{fusion::Method::kBa};
  std::vector<pipeline::Scheme> schemes{pipeline::Scheme::kOac};
  std::vector<double> epsilons{std::numeric_limits<double>::infinity()};
  std::vector<double> ps{1.0};
  std::vector<int> ds;  // empty: defaults to k
  std::vector<double> snr_dbs{0.0};
  std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
  double delta_target = 1e-5;
  double sensitivity = privacy::kDefaultSensitivity;
  projection::Kind projection_kind = projection::Kind::kOrthogonal;
  uint64_t projection_seed = 1;
  pipeline::NoisePlacement noise_placement =
      pipeline::NoisePlacement::kBeforeProjection;
  channel::FadingModel fading{1.0, 0.2};
  double power = 1.0;
  uint64_t master_seed = 0;
  int threads = 0;  // 0: hardware default, capped by AIRFER_THREADS
};

struct Arm {
  fusion::Method method;
  pipeline::Scheme scheme;
  double epsilon;  // +inf for the non-private arms
  double p;
  int d;
  double snr_db;
};

/// Stable stream tag of an arm, independent of config list order.
uint64_t arm_id(const Arm& arm);

std::vector<Arm> expand_arms(const GridConfig& grid, int k);

struct ResultRecord {
  Arm arm;
  int n = 0;
  uint64_t seed = 0;
  double macro_f1 = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRecord> records;
};

ExperimentResult run_experiment(const GridConfig& grid,
                                const data::Dataset& dataset);

struct ArmSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (N-1)
  int count = 0;
};

std::string method_label(fusion::Method method, pipeline::Scheme scheme);
std::string arm_label(const Arm& arm);

// insertion-ordered so emitted summaries are byte-stable
std::vector<std::pair<std::string, ArmSummary>> summarize(
    const ExperimentResult& result);

void write_results_csv(const ExperimentResult& result, const std::string& path);
void write_summary_json(const ExperimentResult& result,
                        const std::string& path);

/// scores[method][column]; rank 1 = best (highest score), mid-ranks on ties,
/// averaged across columns.
std::vector<double> average_ranks(
    const std::vector<std::vector<double>>& scores);

double friedman_statistic(const std::vector<std::vector<double>>& scores);

/// Upper critical value of chi-square at significance alpha (0.05 or 0.10),
/// tabulated for df in [1, 30].
double chi_square_critical(int df, double alpha);

/// Nemenyi critical difference q_alpha(M) * sqrt(M(M+1)/(6N)) for
/// M in [2, 10] methods over N columns, alpha in {0.05, 0.10}.
double nemenyi_cd(int num_methods, int num_columns, double alpha);

struct RankSummary {
  std::vector<std::string> methods;
  std::vector<double> avg_ranks;
  double friedman_stat = 0.0;
  double friedman_critical = 0.0;
  bool significant = false;
  double cd = 0.0;
  double alpha = 0.05;
  // maximal sets of methods whose average ranks lie within one CD
  std::vector<std::vector<std::string>> indistinguishable_groups;
};

RankSummary rank_methods(const std::vector<std::string>& methods,
                         const std::vector<std::vector<double>>& scores,
                         double alpha);

}  // namespace airfer::eval
