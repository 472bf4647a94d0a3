#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "airfer/privacy.hpp"
#include "airfer/rng.hpp"
#include "oracles.hpp"

using namespace airfer::privacy;
using airfer::RngStream;

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

TEST_CASE("delta_for_sigma matches the high-precision oracle") {
  // Phi(0) - e * Phi(-sqrt 2), frozen from the long-double series oracle.
  const double expected =
      static_cast<double>(oracle::analytic_gm_delta(1.0L, 1.0L, kSqrt2));
  CHECK(expected == doctest::Approx(0.2862082112).epsilon(1e-9));
  CHECK(std::abs(delta_for_sigma(1.0, 1.0, kSqrt2) - expected) <= 1e-6);

  // a couple more oracle points across the range
  for (auto [eps, sigma] : {std::pair<double, double>{0.3, 2.0},
                            {2.0, 0.5},
                            {5.0, 1.5},
                            {0.1, 10.0}}) {
    const double want = static_cast<double>(
        oracle::analytic_gm_delta(static_cast<long double>(eps),
                                  static_cast<long double>(sigma), kSqrt2));
    CHECK(delta_for_sigma(eps, sigma, kSqrt2) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("delta_for_sigma limits and monotonicity") {
  CHECK(delta_for_sigma(1.0, 1e6, kSqrt2) < 1e-12);

  // nonincreasing in epsilon at fixed sigma
  double prev = 2.0;
  for (double eps = 0.1; eps <= 10.0; eps += 0.3) {
    const double d = delta_for_sigma(eps, 1.0, kSqrt2);
    CHECK(d <= prev + 1e-15);
    prev = d;
  }

  // strictly decreasing in sigma and epsilon on a log-spaced grid; at the grid
  // corners delta saturates to exactly 0 or 1 in double precision, where
  // strictness is unobservable
  const auto strictly_less = [](double hi, double lo) {
    return hi > lo || (hi == lo && (hi == 0.0 || hi == 1.0));
  };
  const std::vector<double> sigmas{0.01, 0.1, 1.0, 10.0, 100.0};
  const std::vector<double> epsilons{0.01, 0.1, 1.0, 5.0, 10.0};
  for (double eps : epsilons) {
    for (size_t i = 0; i + 1 < sigmas.size(); ++i) {
      CHECK(strictly_less(delta_for_sigma(eps, sigmas[i], kSqrt2),
                          delta_for_sigma(eps, sigmas[i + 1], kSqrt2)));
    }
  }
  for (double sigma : sigmas) {
    for (size_t i = 0; i + 1 < epsilons.size(); ++i) {
      CHECK(strictly_less(delta_for_sigma(epsilons[i], sigma, kSqrt2),
                          delta_for_sigma(epsilons[i + 1], sigma, kSqrt2)));
    }
  }
}

TEST_CASE("delta_for_sigma rejects bad input") {
  CHECK_THROWS_AS(delta_for_sigma(0.0, 1.0, kSqrt2), std::invalid_argument);
  CHECK_THROWS_AS(delta_for_sigma(1.0, -1.0, kSqrt2), std::invalid_argument);
  CHECK_THROWS_AS(delta_for_sigma(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_for_sigma(std::nan(""), 1.0, kSqrt2),
                  std::invalid_argument);
}

TEST_CASE("calibrate_sigma inverts delta_for_sigma") {
  const double delta_at_one =
      static_cast<double>(oracle::analytic_gm_delta(1.0L, 1.0L, kSqrt2));
  CHECK(calibrate_sigma(1.0, delta_at_one, kSqrt2) ==
        doctest::Approx(1.0).epsilon(1e-6));

  // round-trip within relative 1e-9, conservatively from below
  RngStream rng(31);
  for (int i = 0; i < 50; ++i) {
    const double eps = 0.1 + 9.9 * rng.next_unit();
    const double delta = std::exp(std::log(1e-8) +
                                  (std::log(0.3) - std::log(1e-8)) *
                                      rng.next_unit());
    const double sigma = calibrate_sigma(eps, delta, kSqrt2);
    const double back = delta_for_sigma(eps, sigma, kSqrt2);
    CHECK(back <= delta * (1 + 1e-12));
    CHECK(back >= delta * (1 - 1e-9));
  }

  CHECK(calibrate_sigma(5.0, 1e-5, kSqrt2) < calibrate_sigma(1.0, 1e-5, kSqrt2));

  CHECK_THROWS_WITH_AS(calibrate_sigma(1e-6, 1e-300, kSqrt2),
                       doctest::Contains("unreachable within sigma bracket"),
                       std::runtime_error);
}

TEST_CASE("amplify_by_sampling follows the subsampling formulas") {
  const PrivacyBudget target = make_budget(1.0, 1e-5);

  SUBCASE("p = 1 is the exact identity") {
    const PrivacySpec spec = amplify_by_sampling(target, 1.0, 20);
    CHECK(spec.base_epsilon == 1.0);
    CHECK(spec.base_delta == 1e-5);
  }

  SUBCASE("worked example at p = 0.5, n = 2") {
    const PrivacySpec spec = amplify_by_sampling(target, 0.5, 2);
    // eta = 2/3, base eps = ln(1 + 1.5 (e - 1))
    const double want_eps =
        static_cast<double>(std::log(1.0L + 1.5L * (std::exp(1.0L) - 1.0L)));
    CHECK(want_eps == doctest::Approx(1.274634).epsilon(1e-5));
    CHECK(spec.base_epsilon == doctest::Approx(want_eps).epsilon(1e-12));
    CHECK(spec.base_delta == doctest::Approx(1.5e-5).epsilon(1e-12));
  }

  SUBCASE("amplification never weakens the base budget") {
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.99}) {
      const PrivacySpec spec = amplify_by_sampling(target, p, 20);
      CHECK(spec.base_epsilon > target.epsilon_target);
    }
    CHECK(amplify_by_sampling(target, 1.0, 20).base_epsilon ==
          target.epsilon_target);
  }

  SUBCASE("sigma_total is nondecreasing in p") {
    double prev = 0.0;
    for (double p : {0.25, 0.5, 0.75, 1.0}) {
      const double sigma = amplify_by_sampling(target, p, 20).sigma_total;
      CHECK(sigma >= prev);
      prev = sigma;
    }
  }

  SUBCASE("infeasible amplification is rejected") {
    CHECK_THROWS_WITH_AS(
        amplify_by_sampling(make_budget(1.0, 0.9), 0.01, 2000),
        doctest::Contains("infeasible amplification"), std::runtime_error);
  }
}

TEST_CASE("client noise shares recombine to the total variance") {
  PrivacySpec spec;
  spec.sigma_total = 2.0;
  CHECK(client_noise_share(spec, 4).sigma_client == doctest::Approx(1.0));
  spec.sigma_total = 1.0;
  CHECK(client_noise_share(spec, 1).sigma_client == doctest::Approx(1.0));

  spec.sigma_total = 3.7;
  for (int m = 1; m <= 100; ++m) {
    const double sc = client_noise_share(spec, m).sigma_client;
    CHECK(sc * sc * m ==
          doctest::Approx(spec.sigma_total * spec.sigma_total).epsilon(1e-12));
  }
  // nonincreasing per-client share
  double prev = 1e300;
  for (int m = 1; m <= 50; ++m) {
    const double sc = client_noise_share(spec, m).sigma_client;
    CHECK(sc <= prev);
    prev = sc;
  }
  CHECK_THROWS_AS(client_noise_share(spec, 0), std::invalid_argument);
}

TEST_CASE("add_privacy_noise contract") {
  const std::vector<double> v{0.25, 0.5, 0.125, 0.125};

  RngStream rng(3);
  CHECK(add_privacy_noise(v, 0.0, rng) == v);

  RngStream a(77), b(77);
  CHECK(add_privacy_noise(v, 1.3, a) == add_privacy_noise(v, 1.3, b));

  const double sigma = 0.7;
  RngStream mc(15);
  const int n = 100000;
  double mean = 0.0, var = 0.0;
  std::vector<double> deltas(n);
  const std::vector<double> base{0.5};
  for (int i = 0; i < n; ++i) {
    deltas[i] = add_privacy_noise(base, sigma, mc)[0] - 0.5;
    mean += deltas[i];
  }
  mean /= n;
  for (double d : deltas) var += (d - mean) * (d - mean);
  var /= n - 1;
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.03));

  RngStream r2(4);
  CHECK_THROWS_AS(
      add_privacy_noise({std::numeric_limits<double>::infinity()}, 1.0, r2),
      std::invalid_argument);
}

TEST_CASE("randomized response keeps the paper's truth probability") {
  const int k = 10;
  RngStream rng(8);
  int truthful = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int out = rr_perturb(3, 0.0, k, rng);
    REQUIRE(out >= 0);
    REQUIRE(out < k);
    if (out == 3) ++truthful;
  }
  // e^0 / (e^0 + 10) = 1/11
  CHECK(std::abs(static_cast<double>(truthful) / n - 1.0 / 11.0) < 0.01);

  truthful = 0;
  for (int i = 0; i < n; ++i) {
    if (rr_perturb(3, 20.0, k, rng) == 3) ++truthful;
  }
  CHECK(static_cast<double>(truthful) / n > 0.9999);

  CHECK_THROWS_AS(rr_perturb(0, 1.0, 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(rr_perturb(10, 1.0, 10, rng), std::invalid_argument);
}
