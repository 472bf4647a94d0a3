#pragma once

#include <cstdint>
#include <vector>

#include "airfer/rng.hpp"

namespace airfer::privacy {

/// Target differential-privacy guarantee against the inference server.
/// The L2 sensitivity defaults to sqrt(2): swapping one client's model
/// moves the aggregated decision vector by at most one +1 and one -1 entry.
struct PrivacyBudget {
  double epsilon_target;
  double delta_target;
  double sensitivity;
};

inline constexpr double kDefaultSensitivity = 1.4142135623730951;

PrivacyBudget make_budget(double epsilon_target, double delta_target,
                          double sensitivity = kDefaultSensitivity);

/// Budget after subsampling amplification, plus the calibrated total noise
/// scale sigma_total that the participating clients share.
struct PrivacySpec {
  PrivacyBudget budget;
  double participation_p;
  int num_clients;
  double base_epsilon;
  double base_delta;
  double sigma_total;
};

struct ClientNoiseShare {
  double sigma_client;
  int participants;
};

/// Exact delta of the Gaussian mechanism at (epsilon, sigma, sensitivity),
/// clamped to [0, 1]. Throws std::invalid_argument on non-finite or
/// non-positive inputs.
double delta_for_sigma(double epsilon, double sigma, double sensitivity);

/// Smallest sigma with delta_for_sigma(epsilon, sigma) <= delta, found by
/// bisection on [1e-6, 1e6] to relative width 1e-12. Throws
/// std::runtime_error when delta is unreachable within the bracket.
double calibrate_sigma(double epsilon, double delta, double sensitivity);

/// Applies subsampling amplification (participation probability p over n
/// clients, conditioned on a non-empty round) and calibrates sigma_total
/// for the resulting base budget. p = 1 is the exact identity.
PrivacySpec amplify_by_sampling(const PrivacyBudget& target, double p, int n);

/// sigma_client = sigma_total / sqrt(participants): the per-client share
/// whose superposition reproduces the total noise variance.
ClientNoiseShare client_noise_share(const PrivacySpec& spec, int participants);

/// Returns vector + iid N(0, sigma_client^2) draws; sigma_client = 0 returns
/// the input unchanged (no stream consumption).
std::vector<double> add_privacy_noise(const std::vector<double>& vector,
                                      double sigma_client, RngStream& rng);

/// k-ary randomized response: keeps the true label with probability
/// e^eps / (e^eps + k), otherwise reports a uniformly random wrong label.
int rr_perturb(int label, double epsilon, int k, RngStream& rng);

}  // namespace airfer::privacy
