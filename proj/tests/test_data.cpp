#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "airfer/data.hpp"
#include "oracles.hpp"

using namespace airfer::data;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("synthetic generation honors the accuracy knob") {
  SyntheticSpec spec;
  spec.n = 1;
  spec.k = 10;
  spec.num_samples = 10000;
  spec.client_accuracy = 0.6;
  spec.dirichlet_blend = 0.0;
  spec.seed = 3;
  const Dataset ds = generate_synthetic(spec);

  int correct = 0;
  for (int t = 0; t < ds.num_samples; ++t) {
    const auto& scores = ds.belief(0, t).scores;
    // beta = 0 means exact one-hot beliefs
    for (double s : scores) CHECK((s == 0.0 || s == 1.0));
    if (oracle::argmax_lowest(scores, 0.0) == ds.labels[t]) ++correct;
  }
  CHECK(std::abs(static_cast<double>(correct) / ds.num_samples - 0.6) < 0.01);
}

TEST_CASE("synthetic beliefs always pick the target at high accuracy") {
  SyntheticSpec spec;
  spec.n = 3;
  spec.k = 5;
  spec.num_samples = 500;
  spec.client_accuracy = 0.999999;
  spec.dirichlet_blend = 0.0;
  const Dataset ds = generate_synthetic(spec);
  for (int client = 0; client < 3; ++client) {
    for (int t = 0; t < ds.num_samples; ++t) {
      CHECK(oracle::argmax_lowest(ds.belief(client, t).scores, 0.0) ==
            ds.labels[t]);
    }
  }
}

TEST_CASE("synthetic generation is deterministic and splits 10 percent") {
  SyntheticSpec spec;
  spec.n = 4;
  spec.k = 6;
  spec.num_samples = 200;
  spec.seed = 9;
  const Dataset a = generate_synthetic(spec);
  const Dataset b = generate_synthetic(spec);
  CHECK(a.labels == b.labels);
  for (size_t i = 0; i < a.beliefs.size(); ++i) {
    CHECK(a.beliefs[i].scores == b.beliefs[i].scores);
  }
  CHECK(a.val_indices.size() == 20);
  CHECK(a.test_indices.size() == 180);
  // disjoint and exhaustive split
  std::vector<char> seen(a.num_samples, 0);
  for (int t : a.val_indices) seen[t] += 1;
  for (int t : a.test_indices) seen[t] += 1;
  for (char c : seen) CHECK(c == 1);

  for (const auto& belief : a.beliefs) {
    double l1 = 0.0;
    for (double s : belief.scores) {
      CHECK(s >= 0.0);
      l1 += s;
    }
    CHECK(l1 == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("ensemble of weak clients clearly beats one client") {
  SyntheticSpec spec;
  spec.n = 20;
  spec.k = 10;
  spec.num_samples = 10000;
  spec.client_accuracy = 0.6;
  spec.dirichlet_blend = 0.0;
  spec.seed = 17;
  const Dataset ds = generate_synthetic(spec);

  int single = 0, ensemble = 0;
  std::vector<int> votes(spec.n);
  for (int t = 0; t < ds.num_samples; ++t) {
    for (int c = 0; c < spec.n; ++c) {
      votes[c] = oracle::argmax_lowest(ds.belief(c, t).scores, 0.0);
    }
    if (votes[0] == ds.labels[t]) ++single;
    if (oracle::plurality_decision(votes, spec.k) == ds.labels[t]) ++ensemble;
  }
  const double gap =
      static_cast<double>(ensemble - single) / ds.num_samples;
  CHECK(gap >= 0.10);
}

TEST_CASE("score files round-trip") {
  SyntheticSpec spec;
  spec.n = 3;
  spec.k = 4;
  spec.num_samples = 40;
  spec.seed = 5;
  const Dataset ds = generate_synthetic(spec);
  const auto path = temp_file("airfer_roundtrip.csv");
  save_scores(ds, path.string());
  const Dataset back = load_scores(path.string());

  CHECK(back.num_samples == ds.num_samples);
  CHECK(back.num_clients == ds.num_clients);
  CHECK(back.k == ds.k);
  CHECK(back.labels == ds.labels);
  for (size_t i = 0; i < ds.beliefs.size(); ++i) {
    for (int c = 0; c < ds.k; ++c) {
      CHECK(back.beliefs[i].scores[c] ==
            doctest::Approx(ds.beliefs[i].scores[c]).epsilon(1e-9));
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("malformed score files are rejected with line numbers") {
  const auto path = temp_file("airfer_bad.csv");

  {
    std::ofstream out(path);
    out << "sample_id,client_id,label,s0,s1\n";
    out << "0,0,0,0.5,0.5\n";
    out << "0,1,0,0.5\n";  // short row
  }
  CHECK_THROWS_WITH_AS(load_scores(path.string()), doctest::Contains(":3:"),
                       std::runtime_error);

  {
    std::ofstream out(path);
    out << "sample_id,client_id,label,s0,s1\n";
    out << "0,0,0,0.5,-0.1\n";
  }
  CHECK_THROWS_WITH_AS(load_scores(path.string()),
                       doctest::Contains("negative or non-finite score"),
                       std::runtime_error);

  {
    std::ofstream out(path);
    out << "sample_id,client_id,label,s0,s1\n";
    out << "0,0,0,0.5,0.5\n"
        << "1,0,1,0.5,0.5\n";  // client 1 missing entirely for sample 0
    out << "1,1,1,0.5,0.5\n";
  }
  CHECK_THROWS_WITH_AS(load_scores(path.string()),
                       doctest::Contains("(client 1, sample 0)"),
                       std::runtime_error);

  {
    std::ofstream out(path);
    out << "";
  }
  CHECK_THROWS_WITH_AS(load_scores(path.string()),
                       doctest::Contains("empty score file"),
                       std::runtime_error);

  {
    std::ofstream out(path);
    out << "sample_id,client_id,label,s0,s1\n";
    out << "0,0,0,0.5,0.5\n";
    out << "0,1,1,0.5,0.5\n";  // label disagreement
  }
  CHECK_THROWS_WITH_AS(load_scores(path.string()),
                       doctest::Contains("label disagrees"),
                       std::runtime_error);

  std::filesystem::remove(path);
}

TEST_CASE("synthetic parameter validation") {
  SyntheticSpec spec;
  spec.k = 1;
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
  spec.k = 10;
  spec.num_samples = 5;
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
}
