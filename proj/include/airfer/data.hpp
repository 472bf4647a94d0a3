#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airfer/fusion.hpp"

namespace airfer::data {

/// Precomputed per-client classifier scores: the stand-in for locally
/// trained models. Immutable once built.
struct Dataset {
  int num_samples = 0;
  int num_clients = 0;
  int k = 0;
  std::vector<int> labels;  // one per sample
  // beliefs[client * num_samples + sample], each L1-normalized
  std::vector<fusion::BeliefVector> beliefs;
  std::vector<int> val_indices;   // validation split
  std::vector<int> test_indices;  // disjoint from val

  const fusion::BeliefVector& belief(int client, int sample) const {
    return beliefs[static_cast<size_t>(client) * num_samples + sample];
  }
};

struct SyntheticSpec {
  int n = 20;
  int k = 10;
  int num_samples = 10000;
  double client_accuracy = 0.6;   // per-client probability of a correct vote
  double dirichlet_blend = 0.3;   // beta: flat-Dirichlet mass mixed in
  uint64_t seed = 0;
};

/// Uniform labels; per client the belief peaks on the true label with
/// probability client_accuracy (a uniform wrong label otherwise) and is
/// blended with a flat Dirichlet draw. The trailing 10% of samples become
/// the validation split.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Reads the score CSV (header `sample_id,client_id,label,s0,...,s{k-1}`),
/// normalizes rows to belief vectors and validates completeness.
Dataset load_scores(const std::string& path);

/// Writes the same CSV format load_scores reads.
void save_scores(const Dataset& dataset, const std::string& path);

}  // namespace airfer::data
