#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "airfer/fusion.hpp"
#include "airfer/rng.hpp"
#include "oracles.hpp"

using namespace airfer::fusion;
using airfer::RngStream;

TEST_CASE("normalize_beliefs") {
  CHECK(normalize_beliefs({2.0, 2.0}).scores == std::vector<double>{0.5, 0.5});
  CHECK(normalize_beliefs({1.0, 0.0, 0.0}).scores ==
        std::vector<double>{1.0, 0.0, 0.0});
  const BeliefVector b = normalize_beliefs({0.2, 0.3, 0.5});
  for (size_t i = 0; i < 3; ++i) {
    CHECK(b.scores[i] ==
          doctest::Approx(std::vector<double>{0.2, 0.3, 0.5}[i]).epsilon(1e-12));
  }
  CHECK_THROWS_WITH_AS(normalize_beliefs({0.0, 0.0}),
                       doctest::Contains("degenerate"), std::invalid_argument);
  CHECK_THROWS_AS(normalize_beliefs({0.5, -0.1}), std::invalid_argument);
}

TEST_CASE("fusion payloads") {
  const BeliefVector r = normalize_beliefs({0.2, 0.5, 0.3});

  CHECK(fuse_ba(r) == r.scores);

  const ClassWeights w{{0.8, 0.1, 0.1}};
  const std::vector<double> wba = fuse_wba(r, w);
  CHECK(wba[0] == doctest::Approx(0.16));
  CHECK(wba[1] == doctest::Approx(0.05));
  CHECK(wba[2] == doctest::Approx(0.03));
  CHECK(fuse_wba(normalize_beliefs({0.5, 0.5}), ClassWeights{{0.8, 0.2}}) ==
        std::vector<double>{0.4, 0.1});
  CHECK_THROWS_AS(fuse_wba(r, ClassWeights{{0.5, 0.5}}), std::invalid_argument);

  CHECK(fuse_mv(r) == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(fuse_mv(normalize_beliefs({0.5, 0.5})) ==
        std::vector<double>{1.0, 0.0});  // tie to the lowest index
  double l1 = 0.0;
  for (double v : fuse_mv(r)) l1 += std::abs(v);
  CHECK(l1 == 1.0);
}

TEST_CASE("mean centering: argmax preserved, power reduced") {
  const DecisionVector c = mean_center({1.0, 0.0});
  CHECK(c.payload[0] == doctest::Approx(0.5));
  CHECK(c.payload[1] == doctest::Approx(-0.5));
  double sq = 0.0;
  for (double v : c.payload) sq += v * v;
  CHECK(sq == doctest::Approx(0.5));  // 1 - 1/k at k = 2

  const DecisionVector uniform = mean_center({0.25, 0.25, 0.25, 0.25});
  for (double v : uniform.payload) CHECK(v == doctest::Approx(0.0));

  RngStream rng(70);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + rng.next_int(8);
    std::vector<double> v(k);
    for (double& x : v) x = rng.next_unit();
    const DecisionVector centered = mean_center(v);
    CHECK(oracle::argmax_lowest(centered.payload) == oracle::argmax_lowest(v));
    double sum = 0.0, before = 0.0, after = 0.0;
    for (int c2 = 0; c2 < k; ++c2) {
      sum += centered.payload[c2];
      before += v[c2] * v[c2];
      after += centered.payload[c2] * centered.payload[c2];
    }
    CHECK(std::abs(sum) < 1e-9);
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("centered payloads respect the power bound 1 - 1/k") {
  RngStream rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + rng.next_int(9);
    std::vector<double> raw(k);
    for (double& x : raw) x = rng.next_unit();
    const BeliefVector r = normalize_beliefs(raw);
    ClassWeights w{std::vector<double>(k)};
    double total = 0.0;
    for (double& x : w.weights) {
      x = rng.next_unit();
      total += x;
    }
    for (double& x : w.weights) x /= total;

    for (Method method : {Method::kBa, Method::kWba, Method::kMv}) {
      const DecisionVector payload = mean_center(fuse(method, r, w));
      double sq = 0.0;
      for (double v : payload.payload) sq += v * v;
      CHECK(sq <= 1.0 - 1.0 / k + 1e-9);
    }
  }
}

TEST_CASE("wba with uniform weights decides like ba") {
  RngStream rng(72);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + rng.next_int(6);
    std::vector<double> raw(k);
    for (double& x : raw) x = rng.next_unit() + 1e-6;
    const BeliefVector r = normalize_beliefs(raw);
    const ClassWeights uniform{std::vector<double>(k, 1.0 / k)};
    CHECK(oracle::argmax_lowest(fuse_wba(r, uniform)) ==
          oracle::argmax_lowest(fuse_ba(r)));
  }
}

TEST_CASE("averaged MV payloads reproduce plurality voting") {
  RngStream rng(73);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + rng.next_int(7);
    const int k = 2 + rng.next_int(4);
    std::vector<int> votes(n);
    std::vector<double> average(k, 0.0);
    for (int i = 0; i < n; ++i) {
      std::vector<double> raw(k);
      for (double& x : raw) x = rng.next_unit() + 1e-9;
      const BeliefVector r = normalize_beliefs(raw);
      votes[i] = oracle::argmax_lowest(r.scores, 0.0);
      const DecisionVector payload = mean_center(fuse_mv(r));
      for (int c = 0; c < k; ++c) average[c] += payload.payload[c] / n;
    }
    // average equals vote-fraction minus 1/k, so the argmax is the plurality
    CHECK(oracle::argmax_lowest(average) ==
          oracle::plurality_decision(votes, k));
  }
}

TEST_CASE("class weights from validation accuracy") {
  const BeliefVector right0 = normalize_beliefs({0.9, 0.1});
  const BeliefVector right1 = normalize_beliefs({0.1, 0.9});

  const ClassWeights balanced =
      class_weights({{right0, 0}, {right1, 1}, {right0, 0}, {right1, 1}}, 2);
  CHECK(balanced.weights[0] == doctest::Approx(0.5));
  CHECK(balanced.weights[1] == doctest::Approx(0.5));

  const ClassWeights lopsided =
      class_weights({{right0, 0}, {right0, 1}}, 2);  // class 1 always missed
  CHECK(lopsided.weights[0] == doctest::Approx(1.0));
  CHECK(lopsided.weights[1] == doctest::Approx(0.0));

  const ClassWeights fallback = class_weights({{right0, 1}}, 2);
  CHECK(fallback.weights[0] == doctest::Approx(0.5));
  CHECK(fallback.weights[1] == doctest::Approx(0.5));

  double total = 0.0;
  for (double w : balanced.weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(class_weights({}, 2), std::invalid_argument);
}
