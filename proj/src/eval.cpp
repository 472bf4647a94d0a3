#include "airfer/eval.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace airfer::eval {
namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AIRFER_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

double macro_f1(const std::vector<int>& preds, const std::vector<int>& labels,
                int k) {
  if (preds.size() != labels.size() || preds.empty()) {
    throw std::invalid_argument("macro_f1: need equal nonzero lengths");
  }
  std::vector<long> tp(k, 0), fp(k, 0), fn(k, 0);
  for (size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i];
    const int l = labels[i];
    if (p < 0 || p >= k || l < 0 || l >= k) {
      throw std::invalid_argument("macro_f1: class index out of range");
    }
    if (p == l) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[l];
    }
  }
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    const long denom = 2 * tp[c] + fp[c] + fn[c];
    total += denom == 0 ? 0.0 : 2.0 * tp[c] / static_cast<double>(denom);
  }
  return total / k;
}

int select_best_client(const data::Dataset& dataset) {
  if (dataset.val_indices.empty()) {
    throw std::invalid_argument("select_best_client: empty validation set");
  }
  std::vector<int> val_labels;
  val_labels.reserve(dataset.val_indices.size());
  for (int t : dataset.val_indices) val_labels.push_back(dataset.labels[t]);

  int best = 0;
  double best_score = -1.0;
  std::vector<int> preds(dataset.val_indices.size());
  for (int client = 0; client < dataset.num_clients; ++client) {
    for (size_t j = 0; j < dataset.val_indices.size(); ++j) {
      preds[j] = fusion::argmax_lowest(
          dataset.belief(client, dataset.val_indices[j]).scores, 0.0);
    }
    const double score = macro_f1(preds, val_labels, dataset.k);
    if (score > best_score) {
      best_score = score;
      best = client;
    }
  }
  return best;
}

uint64_t arm_id(const Arm& arm) {
  uint64_t h = mix64(static_cast<uint64_t>(arm.method) + 0x11);
  h = mix64(h ^ (static_cast<uint64_t>(arm.scheme) + 0x23));
  h = mix64(h ^ std::bit_cast<uint64_t>(arm.epsilon));
  h = mix64(h ^ std::bit_cast<uint64_t>(arm.p));
  h = mix64(h ^ static_cast<uint64_t>(arm.d));
  h = mix64(h ^ std::bit_cast<uint64_t>(arm.snr_db));
  return h;
}

std::vector<Arm> expand_arms(const GridConfig& grid, int k) {
  std::vector<int> ds = grid.ds;
  if (ds.empty()) ds.push_back(k);
  std::vector<Arm> arms;
  for (double eps : grid.epsilons) {
    for (double p : grid.ps) {
      for (int d : ds) {
        for (double snr : grid.snr_dbs) {
          for (pipeline::Scheme scheme : grid.schemes) {
            if (scheme == pipeline::Scheme::kBestClient) {
              arms.push_back(
                  Arm{fusion::Method::kBa, scheme, eps, p, d, snr});
              continue;
            }
            for (fusion::Method method : grid.methods) {
              if ((scheme == pipeline::Scheme::kRrOac ||
                   scheme == pipeline::Scheme::kRrOrthogonal) &&
                  method != fusion::Method::kMv) {
                continue;
              }
              arms.push_back(Arm{method, scheme, eps, p, d, snr});
            }
          }
        }
      }
    }
  }
  return arms;
}

std::string method_label(fusion::Method method, pipeline::Scheme scheme) {
  if (scheme == pipeline::Scheme::kBestClient) return "best_client";
  std::string m;
  switch (method) {
    case fusion::Method::kBa:
      m = "ba";
      break;
    case fusion::Method::kWba:
      m = "wba";
      break;
    case fusion::Method::kMv:
      m = "mv";
      break;
  }
  switch (scheme) {
    case pipeline::Scheme::kOac:
      return m + "-oac";
    case pipeline::Scheme::kOrthogonal:
      return m + "-orthogonal";
    case pipeline::Scheme::kRrOac:
      return m + "-rr_oac";
    case pipeline::Scheme::kRrOrthogonal:
      return m + "-rr_orthogonal";
    default:
      return m;
  }
}

std::string arm_label(const Arm& arm) {
  std::ostringstream out;
  out << method_label(arm.method, arm.scheme)
      << " eps=" << format_double(arm.epsilon) << " p=" << format_double(arm.p)
      << " d=" << arm.d << " snr_db=" << format_double(arm.snr_db);
  return out.str();
}

ExperimentResult run_experiment(const GridConfig& grid,
                                const data::Dataset& dataset) {
  const int n = dataset.num_clients;
  const int k = dataset.k;
  const std::vector<Arm> arms = expand_arms(grid, k);
  if (arms.empty()) throw std::invalid_argument("empty experiment grid");
  if (grid.seeds.empty()) throw std::invalid_argument("no seeds configured");

  // Shared per-dataset inputs, computed once.
  std::vector<fusion::ClassWeights> weights(n);
  {
    std::vector<std::pair<fusion::BeliefVector, int>> val;
    for (int client = 0; client < n; ++client) {
      val.clear();
      for (int t : dataset.val_indices) {
        val.emplace_back(dataset.belief(client, t), dataset.labels[t]);
      }
      weights[client] = fusion::class_weights(val, k);
    }
  }
  const int best_client = select_best_client(dataset);
  std::vector<std::vector<int>> votes(n);
  for (int client = 0; client < n; ++client) {
    votes[client].resize(dataset.num_samples);
    for (int t = 0; t < dataset.num_samples; ++t) {
      votes[client][t] =
          fusion::argmax_lowest(dataset.belief(client, t).scores, 0.0);
    }
  }
  std::vector<int> test_labels;
  test_labels.reserve(dataset.test_indices.size());
  for (int t : dataset.test_indices) test_labels.push_back(dataset.labels[t]);

  struct Unit {
    size_t arm_index;
    uint64_t seed;
  };
  std::vector<Unit> units;
  for (size_t a = 0; a < arms.size(); ++a) {
    for (uint64_t seed : grid.seeds) units.push_back(Unit{a, seed});
  }

  ExperimentResult result;
  result.records.resize(units.size());

  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    std::vector<int> preds(dataset.test_indices.size());
    std::vector<int> round_labels(n);
    pipeline::BeliefView beliefs(n);
    for (;;) {
      const size_t u = next.fetch_add(1);
      if (u >= units.size()) return;
      try {
        const Arm& arm = arms[units[u].arm_index];
        const uint64_t seed = units[u].seed;

        pipeline::RoundConfig cfg;
        cfg.n = n;
        cfg.p = arm.p;
        cfg.k = k;
        cfg.d = arm.d;
        cfg.method = arm.method;
        cfg.scheme = arm.scheme;
        cfg.noise_placement = grid.noise_placement;
        cfg.fading = grid.fading;
        cfg.power = channel::make_power_constraint(grid.power, arm.snr_db);
        cfg.master_seed = grid.master_seed;
        if (std::isfinite(arm.epsilon)) {
          cfg.privacy_spec = privacy::amplify_by_sampling(
              privacy::make_budget(arm.epsilon, grid.delta_target,
                                   grid.sensitivity),
              arm.p, n);
        }
        cfg.projection_spec = projection::ProjectionSpec{
            grid.projection_kind, arm.d, k,
            mix64(grid.projection_seed ^ mix64(seed + 0x9e3779b97f4a7c15ULL))};
        const projection::ProjectionMatrix P =
            projection::sample_projection(cfg.projection_spec);

        const uint64_t id = arm_id(arm);
        for (size_t j = 0; j < dataset.test_indices.size(); ++j) {
          const int t = dataset.test_indices[j];
          for (int client = 0; client < n; ++client) {
            beliefs[client] = &dataset.belief(client, t);
            round_labels[client] = votes[client][t];
          }
          const pipeline::RoundKey key = pipeline::make_round_key(
              grid.master_seed, id, seed, static_cast<uint64_t>(t));
          preds[j] = pipeline::run_round(beliefs, weights, round_labels,
                                         best_client, cfg, P, key)
                         .decision;
        }
        result.records[u] = ResultRecord{arm, n, seed,
                                         macro_f1(preds, test_labels, k)};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int threads =
      std::min<int>(resolve_threads(grid.threads), units.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

std::vector<std::pair<std::string, ArmSummary>> summarize(
    const ExperimentResult& result) {
  std::vector<std::pair<std::string, ArmSummary>> out;
  std::vector<std::string> order;
  std::vector<std::vector<double>> values;
  for (const ResultRecord& rec : result.records) {
    const std::string label = arm_label(rec.arm);
    auto it = std::find(order.begin(), order.end(), label);
    if (it == order.end()) {
      order.push_back(label);
      values.emplace_back();
      it = std::prev(order.end());
    }
    values[it - order.begin()].push_back(rec.macro_f1);
  }
  for (size_t i = 0; i < order.size(); ++i) {
    const auto& v = values[i];
    // Welford keeps the variance exactly zero for identical samples
    double mean = 0.0, m2 = 0.0;
    for (size_t j = 0; j < v.size(); ++j) {
      const double delta = v[j] - mean;
      mean += delta / static_cast<double>(j + 1);
      m2 += delta * (v[j] - mean);
    }
    const double std_dev =
        v.size() > 1 ? std::sqrt(m2 / static_cast<double>(v.size() - 1)) : 0.0;
    out.emplace_back(order[i],
                     ArmSummary{mean, std_dev, static_cast<int>(v.size())});
  }
  return out;
}

void write_results_csv(const ExperimentResult& result,
                       const std::string& path) {
  std::ostringstream out;
  out << "method,scheme,epsilon,p,d,snr_db,n,seed,macro_f1\n";
  for (const ResultRecord& rec : result.records) {
    std::string method, scheme;
    switch (rec.arm.method) {
      case fusion::Method::kBa:
        method = "ba";
        break;
      case fusion::Method::kWba:
        method = "wba";
        break;
      case fusion::Method::kMv:
        method = "mv";
        break;
    }
    switch (rec.arm.scheme) {
      case pipeline::Scheme::kOac:
        scheme = "oac";
        break;
      case pipeline::Scheme::kOrthogonal:
        scheme = "orthogonal";
        break;
      case pipeline::Scheme::kBestClient:
        scheme = "best_client";
        method = "best_client";
        break;
      case pipeline::Scheme::kRrOac:
        scheme = "rr_oac";
        break;
      case pipeline::Scheme::kRrOrthogonal:
        scheme = "rr_orthogonal";
        break;
    }
    out << method << "," << scheme << "," << format_double(rec.arm.epsilon)
        << "," << format_double(rec.arm.p) << "," << rec.arm.d << ","
        << format_double(rec.arm.snr_db) << "," << rec.n << "," << rec.seed
        << "," << format_full(rec.macro_f1) << "\n";
  }
  atomic_write(path, out.str());
}

void write_summary_json(const ExperimentResult& result,
                        const std::string& path) {
  nlohmann::ordered_json doc;
  for (const auto& [label, summary] : summarize(result)) {
    doc[label] = {{"mean", summary.mean},
                  {"std", summary.std},
                  {"count", summary.count}};
  }
  atomic_write(path, doc.dump(2) + "\n");
}

std::vector<double> average_ranks(
    const std::vector<std::vector<double>>& scores) {
  const size_t methods = scores.size();
  if (methods < 2) throw std::invalid_argument("average_ranks: need >= 2 rows");
  const size_t columns = scores[0].size();
  if (columns < 1) throw std::invalid_argument("average_ranks: empty rows");
  for (const auto& row : scores) {
    if (row.size() != columns) {
      throw std::invalid_argument("average_ranks: ragged score matrix");
    }
    for (double v : row) {
      if (std::isnan(v)) throw std::invalid_argument("average_ranks: NaN score");
    }
  }
  std::vector<double> ranks(methods, 0.0);
  std::vector<size_t> order(methods);
  for (size_t col = 0; col < columns; ++col) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return scores[a][col] > scores[b][col];
    });
    // mid-ranks over runs of exactly equal scores
    size_t i = 0;
    while (i < methods) {
      size_t j = i;
      while (j + 1 < methods &&
             scores[order[j + 1]][col] == scores[order[i]][col]) {
        ++j;
      }
      const double mid = 0.5 * static_cast<double>(i + 1 + j + 1);
      for (size_t r = i; r <= j; ++r) ranks[order[r]] += mid;
      i = j + 1;
    }
  }
  for (double& r : ranks) r /= static_cast<double>(columns);
  return ranks;
}

double friedman_statistic(const std::vector<std::vector<double>>& scores) {
  const std::vector<double> ranks = average_ranks(scores);
  const double m = static_cast<double>(scores.size());
  const double n = static_cast<double>(scores[0].size());
  double sum_sq = 0.0;
  for (double r : ranks) sum_sq += r * r;
  return 12.0 * n / (m * (m + 1.0)) *
         (sum_sq - m * (m + 1.0) * (m + 1.0) / 4.0);
}

double chi_square_critical(int df, double alpha) {
  static constexpr double k05[30] = {
      3.841,  5.991,  7.815,  9.488,  11.070, 12.592, 14.067, 15.507,
      16.919, 18.307, 19.675, 21.026, 22.362, 23.685, 24.996, 26.296,
      27.587, 28.869, 30.144, 31.410, 32.671, 33.924, 35.172, 36.415,
      37.652, 38.885, 40.113, 41.337, 42.557, 43.773};
  static constexpr double k10[30] = {
      2.706,  4.605,  6.251,  7.779,  9.236,  10.645, 12.017, 13.362,
      14.684, 15.987, 17.275, 18.549, 19.812, 21.064, 22.307, 23.542,
      24.769, 25.989, 27.204, 28.412, 29.615, 30.813, 32.007, 33.196,
      34.382, 35.563, 36.741, 37.916, 39.087, 40.256};
  if (df < 1 || df > 30) {
    throw std::invalid_argument("chi_square_critical: df must be in [1, 30]");
  }
  if (alpha == 0.05) return k05[df - 1];
  if (alpha == 0.10) return k10[df - 1];
  throw std::invalid_argument("chi_square_critical: alpha must be 0.05 or 0.10");
}

double nemenyi_cd(int num_methods, int num_columns, double alpha) {
  static constexpr double q05[9] = {1.960, 2.343, 2.569, 2.728, 2.850,
                                    2.949, 3.031, 3.102, 3.164};
  static constexpr double q10[9] = {1.645, 2.052, 2.291, 2.459, 2.589,
                                    2.693, 2.780, 2.855, 2.920};
  if (num_methods < 2 || num_methods > 10) {
    throw std::invalid_argument("nemenyi_cd: method count outside [2, 10]");
  }
  if (num_columns < 2) {
    throw std::invalid_argument("nemenyi_cd: need at least 2 columns");
  }
  const double* table;
  if (alpha == 0.05) {
    table = q05;
  } else if (alpha == 0.10) {
    table = q10;
  } else {
    throw std::invalid_argument("nemenyi_cd: alpha must be 0.05 or 0.10");
  }
  const double m = static_cast<double>(num_methods);
  return table[num_methods - 2] *
         std::sqrt(m * (m + 1.0) / (6.0 * static_cast<double>(num_columns)));
}

RankSummary rank_methods(const std::vector<std::string>& methods,
                         const std::vector<std::vector<double>>& scores,
                         double alpha) {
  if (methods.size() != scores.size()) {
    throw std::invalid_argument("rank_methods: label/score size mismatch");
  }
  RankSummary summary;
  summary.methods = methods;
  summary.avg_ranks = average_ranks(scores);
  summary.friedman_stat = friedman_statistic(scores);
  summary.friedman_critical =
      chi_square_critical(static_cast<int>(methods.size()) - 1, alpha);
  summary.significant = summary.friedman_stat > summary.friedman_critical;
  summary.cd = nemenyi_cd(static_cast<int>(methods.size()),
                          static_cast<int>(scores[0].size()), alpha);
  summary.alpha = alpha;

  std::vector<size_t> order(methods.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return summary.avg_ranks[a] < summary.avg_ranks[b];
  });
  // maximal rank intervals no wider than one CD
  size_t prev_end = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    size_t j = i;
    while (j + 1 < order.size() &&
           summary.avg_ranks[order[j + 1]] - summary.avg_ranks[order[i]] <=
               summary.cd) {
      ++j;
    }
    if (j > i && (summary.indistinguishable_groups.empty() || j + 1 > prev_end)) {
      std::vector<std::string> group;
      for (size_t r = i; r <= j; ++r) group.push_back(methods[order[r]]);
      summary.indistinguishable_groups.push_back(std::move(group));
      prev_end = j + 1;
    }
  }
  return summary;
}

}  // namespace airfer::eval
