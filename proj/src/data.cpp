#include "airfer/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "airfer/rng.hpp"

namespace airfer::data {
namespace {

constexpr uint64_t kDatasetTag = 0x44415441;

void split_tail_validation(Dataset& ds) {
  // trailing 10% of samples form the validation split
  const int val_count = std::max(1, ds.num_samples / 10);
  for (int t = 0; t < ds.num_samples; ++t) {
    if (t >= ds.num_samples - val_count) {
      ds.val_indices.push_back(t);
    } else {
      ds.test_indices.push_back(t);
    }
  }
}

[[noreturn]] void format_error(const std::string& path, int line,
                               const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.k < 2) throw std::invalid_argument("synthetic: k must be >= 2");
  if (spec.num_samples < 10) {
    throw std::invalid_argument("synthetic: num_samples must be >= 10");
  }
  if (spec.n < 1) throw std::invalid_argument("synthetic: n must be >= 1");
  if (!(spec.client_accuracy > 0.0 && spec.client_accuracy < 1.0)) {
    throw std::invalid_argument("synthetic: client_accuracy must be in (0,1)");
  }
  if (spec.dirichlet_blend < 0.0 || spec.dirichlet_blend > 1.0) {
    throw std::invalid_argument("synthetic: dirichlet_blend must be in [0,1]");
  }

  Dataset ds;
  ds.num_samples = spec.num_samples;
  ds.num_clients = spec.n;
  ds.k = spec.k;
  ds.labels.resize(spec.num_samples);
  ds.beliefs.resize(static_cast<size_t>(spec.n) * spec.num_samples);

  RngStream label_rng = derive_stream(spec.seed, kDatasetTag, 0);
  for (int t = 0; t < spec.num_samples; ++t) {
    ds.labels[t] = label_rng.next_int(spec.k);
  }

  std::vector<double> raw(spec.k);
  for (int client = 0; client < spec.n; ++client) {
    RngStream rng = derive_stream(spec.seed, kDatasetTag, 1,
                                  static_cast<uint64_t>(client));
    for (int t = 0; t < spec.num_samples; ++t) {
      int target = ds.labels[t];
      if (rng.next_unit() >= spec.client_accuracy) {
        const int wrong = rng.next_int(spec.k - 1);
        target = wrong >= ds.labels[t] ? wrong + 1 : wrong;
      }
      // flat Dirichlet via normalized unit exponentials
      double total = 0.0;
      for (int c = 0; c < spec.k; ++c) {
        raw[c] = -std::log(1.0 - rng.next_unit());
        total += raw[c];
      }
      const double beta = spec.dirichlet_blend;
      for (int c = 0; c < spec.k; ++c) {
        raw[c] = beta * raw[c] / total + (c == target ? 1.0 - beta : 0.0);
      }
      ds.beliefs[static_cast<size_t>(client) * spec.num_samples + t] =
          fusion::normalize_beliefs(raw);
    }
  }
  split_tail_validation(ds);
  return ds;
}

Dataset load_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open score file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty score file");
  }
  if (line.rfind("sample_id,client_id,label,s0", 0) != 0) {
    format_error(path, 1, "unexpected header: " + line);
  }
  const int k = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 2;
  if (k < 2) format_error(path, 1, "header must list at least two scores");

  std::map<std::pair<int, int>, std::vector<double>> cells;
  std::map<int, int> labels;
  int max_sample = -1, max_client = -1;
  int line_no = 1;
  std::vector<double> scores(k);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (static_cast<int>(fields.size()) != k + 3) {
      format_error(path, line_no, "expected " + std::to_string(k + 3) +
                                      " columns, got " +
                                      std::to_string(fields.size()));
    }
    int sample = 0, client = 0, label = 0;
    try {
      sample = std::stoi(fields[0]);
      client = std::stoi(fields[1]);
      label = std::stoi(fields[2]);
      for (int c = 0; c < k; ++c) scores[c] = std::stod(fields[3 + c]);
    } catch (const std::exception&) {
      format_error(path, line_no, "unparseable numeric field");
    }
    if (label < 0 || label >= k) {
      format_error(path, line_no, "label " + std::to_string(label) +
                                      " outside [0, " + std::to_string(k) +
                                      ")");
    }
    for (double s : scores) {
      if (s < 0.0 || !std::isfinite(s)) {
        format_error(path, line_no, "negative or non-finite score");
      }
    }
    const auto [it, inserted] = labels.emplace(sample, label);
    if (!inserted && it->second != label) {
      format_error(path, line_no, "label disagrees across clients for sample " +
                                      std::to_string(sample));
    }
    if (!cells.emplace(std::make_pair(client, sample), scores).second) {
      format_error(path, line_no, "duplicate (sample, client) row");
    }
    max_sample = std::max(max_sample, sample);
    max_client = std::max(max_client, client);
  }
  if (max_sample < 0) throw std::runtime_error(path + ": no data rows");

  Dataset ds;
  ds.num_samples = max_sample + 1;
  ds.num_clients = max_client + 1;
  ds.k = k;
  ds.labels.resize(ds.num_samples);
  ds.beliefs.resize(static_cast<size_t>(ds.num_clients) * ds.num_samples);
  for (int t = 0; t < ds.num_samples; ++t) {
    const auto it = labels.find(t);
    if (it == labels.end()) {
      throw std::runtime_error(path + ": no rows for sample " +
                               std::to_string(t));
    }
    ds.labels[t] = it->second;
  }
  for (int client = 0; client < ds.num_clients; ++client) {
    for (int t = 0; t < ds.num_samples; ++t) {
      const auto it = cells.find(std::make_pair(client, t));
      if (it == cells.end()) {
        std::ostringstream msg;
        msg << path << ": incomplete score matrix, first missing cell is "
            << "(client " << client << ", sample " << t << ")";
        throw std::runtime_error(msg.str());
      }
      ds.beliefs[static_cast<size_t>(client) * ds.num_samples + t] =
          fusion::normalize_beliefs(it->second);
    }
  }
  split_tail_validation(ds);
  return ds;
}

void save_scores(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // keep \n endings everywhere
  if (!out) throw std::runtime_error("cannot write score file: " + path);
  out << "sample_id,client_id,label";
  for (int c = 0; c < dataset.k; ++c) out << ",s" << c;
  out << "\n";
  char buf[32];
  for (int t = 0; t < dataset.num_samples; ++t) {
    for (int client = 0; client < dataset.num_clients; ++client) {
      out << t << "," << client << "," << dataset.labels[t];
      for (double s : dataset.belief(client, t).scores) {
        std::snprintf(buf, sizeof buf, "%.17g", s);
        out << "," << buf;
      }
      out << "\n";
    }
  }
}

}  // namespace airfer::data
