#pragma once

#include <vector>

#include "airfer/rng.hpp"

namespace airfer::channel {

/// Real zero-mean normal fading with a squared-gain transmission threshold.
/// h_min > 0 keeps the inverse-gain moments finite.
struct FadingModel {
  double sigma_h;
  double h_min;
};

struct PowerConstraint {
  double power;      // per-client average transmit power budget
  double snr_db;     // SNR = power / noise_std^2, in dB
  double noise_std;  // AWGN standard deviation sigma_n
};

/// Transmit scaling gamma = participants * sqrt(power / (mu * (1 - 1/k +
/// d * sigma_client^2))), carrying the inverse-gain moment it was built from.
struct ScalingFactor {
  double gamma;
  double mu;
  int participants;
};

/// One round's channel state: per-participant gains (constant over the
/// round's d symbols) and the AWGN vector.
struct ChannelRealization {
  std::vector<std::pair<int, double>> gains;  // (client, gain), sorted
  std::vector<double> awgn;
};

/// E1(x) = int_x^inf e^-t / t dt to <= 1e-12 relative error; power series
/// for x <= 1, modified-Lentz continued fraction for x > 1.
double exp_integral_e1(double x);

/// The E1-based inverse-gain moment of the fading model,
/// E1(h_min / (2 sigma_h^2)) / (sqrt(2 pi) sigma_h). Throws when h_min = 0
/// (the integral diverges; configure a positive threshold). Note this equals
/// the normal-restricted moment E[1{h^2 >= h_min} / |h|].
double mu_inv_h(const FadingModel& model);

/// Exact conditional moment E[1/h^2 | h^2 >= h_min] of the truncated normal;
/// this is the moment the transmit-side power calibration needs when gains
/// are drawn by rejection.
double truncated_inv_sq_moment(const FadingModel& model);

ScalingFactor scaling_factor(int participants, double power, double mu, int k,
                             int d, double sigma_client);

PowerConstraint make_power_constraint(double power, double snr_db);

double snr_to_noise_std(double snr_db, double power);

/// Rejection-samples h ~ N(0, sigma_h^2) until h^2 >= h_min. Throws a
/// configuration error when the acceptance probability is below 1e-6.
double sample_gain(const FadingModel& model, RngStream& rng);

/// Received signal sum_i h_i * y_i + n over the shared channel. Every signal
/// needs a matching gain in the realization.
std::vector<double> transmit_mac(
    const std::vector<std::pair<int, std::vector<double>>>& signals,
    const ChannelRealization& realization);

}  // namespace airfer::channel
