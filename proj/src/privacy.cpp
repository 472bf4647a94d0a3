#include "airfer/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace airfer::privacy {
namespace {

// Standard normal CDF via erfc; absolute error well below 1e-14.
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void require_positive_finite(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    std::ostringstream msg;
    msg << name << " must be positive and finite, got " << v;
    throw std::invalid_argument(msg.str());
  }
}

constexpr double kSigmaLo = 1e-6;
constexpr double kSigmaHi = 1e6;

}  // namespace

PrivacyBudget make_budget(double epsilon_target, double delta_target,
                          double sensitivity) {
  require_positive_finite(epsilon_target, "epsilon_target");
  require_positive_finite(sensitivity, "sensitivity");
  if (!(delta_target > 0.0 && delta_target < 1.0)) {
    throw std::invalid_argument("delta_target must lie in (0, 1)");
  }
  return PrivacyBudget{epsilon_target, delta_target, sensitivity};
}

double delta_for_sigma(double epsilon, double sigma, double sensitivity) {
  require_positive_finite(epsilon, "epsilon");
  require_positive_finite(sigma, "sigma");
  require_positive_finite(sensitivity, "sensitivity");
  const double a = sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / sensitivity;
  const double tail = normal_cdf(-a - b);
  // tail underflows to 0 long before exp(epsilon) can overflow the product
  const double second = tail > 0.0 ? std::exp(epsilon) * tail : 0.0;
  const double delta = normal_cdf(a - b) - second;
  return std::clamp(delta, 0.0, 1.0);  // float cancellation can go tiny-negative
}

double calibrate_sigma(double epsilon, double delta, double sensitivity) {
  require_positive_finite(epsilon, "epsilon");
  require_positive_finite(sensitivity, "sensitivity");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  double lo = kSigmaLo;
  double hi = kSigmaHi;
  const double delta_lo = delta_for_sigma(epsilon, lo, sensitivity);
  const double delta_hi = delta_for_sigma(epsilon, hi, sensitivity);
  // Monotonicity is asserted on the bracket, not assumed.
  if (!(delta_lo > delta_hi)) {
    throw std::runtime_error(
        "calibrate_sigma: delta(sigma) is not decreasing on [1e-6, 1e6]");
  }
  if (delta > delta_lo || delta < delta_hi) {
    std::ostringstream msg;
    msg << "calibrate_sigma: target delta " << delta
        << " unreachable within sigma bracket [" << kSigmaLo << ", " << kSigmaHi
        << "] (delta range [" << delta_hi << ", " << delta_lo << "])";
    throw std::runtime_error(msg.str());
  }
  // Invariant: delta(lo) > delta >= delta(hi); return the conservative end.
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * lo; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (delta_for_sigma(epsilon, mid, sensitivity) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

PrivacySpec amplify_by_sampling(const PrivacyBudget& target, double p, int n) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("participation probability must be in (0, 1]");
  }
  if (n < 1) throw std::invalid_argument("num_clients must be >= 1");
  PrivacySpec spec;
  spec.budget = target;
  spec.participation_p = p;
  spec.num_clients = n;
  if (p == 1.0) {
    spec.base_epsilon = target.epsilon_target;
    spec.base_delta = target.delta_target;
  } else {
    const double eta = p / (1.0 - std::pow(1.0 - p, n));
    spec.base_epsilon = std::log1p(std::expm1(target.epsilon_target) / eta);
    spec.base_delta = target.delta_target / eta;
    if (spec.base_delta >= 1.0) {
      std::ostringstream msg;
      msg << "infeasible amplification: delta'/eta = " << spec.base_delta
          << " >= 1 for p = " << p << ", n = " << n;
      throw std::runtime_error(msg.str());
    }
  }
  spec.sigma_total = calibrate_sigma(spec.base_epsilon, spec.base_delta,
                                     target.sensitivity);
  return spec;
}

ClientNoiseShare client_noise_share(const PrivacySpec& spec,
                                    int participants) {
  if (participants < 1) {
    throw std::invalid_argument("participants must be >= 1");
  }
  return ClientNoiseShare{
      spec.sigma_total / std::sqrt(static_cast<double>(participants)),
      participants};
}

std::vector<double> add_privacy_noise(const std::vector<double>& vector,
                                      double sigma_client, RngStream& rng) {
  if (sigma_client < 0.0 || !std::isfinite(sigma_client)) {
    throw std::invalid_argument("sigma_client must be finite and >= 0");
  }
  for (double v : vector) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("add_privacy_noise: non-finite input");
    }
  }
  if (sigma_client == 0.0) return vector;
  std::vector<double> out(vector.size());
  for (size_t i = 0; i < vector.size(); ++i) {
    out[i] = vector[i] + sigma_client * rng.next_gaussian();
  }
  return out;
}

int rr_perturb(int label, double epsilon, int k, RngStream& rng) {
  if (k < 2) throw std::invalid_argument("rr_perturb needs k >= 2");
  if (label < 0 || label >= k) {
    throw std::invalid_argument("rr_perturb: label out of range");
  }
  if (epsilon < 0.0 || !std::isfinite(epsilon)) {
    // epsilon = inf is handled by callers as "no perturbation"
    throw std::invalid_argument("rr_perturb: epsilon must be finite and >= 0");
  }
  const double e = std::exp(epsilon);
  const double keep = e / (e + static_cast<double>(k));
  if (rng.next_unit() < keep) return label;
  // uniform over the k-1 wrong labels
  const int wrong = rng.next_int(k - 1);
  return wrong >= label ? wrong + 1 : wrong;
}

}  // namespace airfer::privacy
