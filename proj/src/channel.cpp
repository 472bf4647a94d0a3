#include "airfer/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "airfer/kernels.hpp"

namespace airfer::channel {
namespace {

constexpr double kEulerGamma = 0.5772156649015328606;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double e1_series(double x) {
  // E1(x) = -gamma - ln x - sum_{m>=1} (-x)^m / (m * m!)
  double sum = 0.0;
  double term = 1.0;  // (-x)^m / m! running product
  for (int m = 1; m <= 60; ++m) {
    term *= -x / m;
    const double contrib = term / m;
    sum += contrib;
    if (std::abs(contrib) < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

double e1_continued_fraction(double x) {
  // E1(x) = e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...)))), modified Lentz
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int m = 1; m <= 200; ++m) {
    const double a = -static_cast<double>(m) * m;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return f * std::exp(-x);
}

}  // namespace

double exp_integral_e1(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("exp_integral_e1: x must be > 0");
  }
  return x <= 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double mu_inv_h(const FadingModel& model) {
  if (!(model.sigma_h > 0.0)) {
    throw std::invalid_argument("mu_inv_h: sigma_h must be > 0");
  }
  if (model.h_min <= 0.0) {
    throw std::invalid_argument(
        "mu_inv_h: the inverse-gain integral diverges at h_min = 0; "
        "configure a positive squared-gain threshold");
  }
  const double s = model.sigma_h;
  return exp_integral_e1(model.h_min / (2.0 * s * s)) /
         (std::sqrt(2.0 * std::numbers::pi) * s);
}

double truncated_inv_sq_moment(const FadingModel& model) {
  if (!(model.sigma_h > 0.0)) {
    throw std::invalid_argument("truncated_inv_sq_moment: sigma_h must be > 0");
  }
  if (model.h_min <= 0.0) {
    throw std::invalid_argument(
        "truncated_inv_sq_moment: h_min must be > 0 for a finite moment");
  }
  const double s = model.sigma_h;
  const double a = std::sqrt(model.h_min);
  // integration by parts of the restricted integral:
  // E[1/h^2 * 1{h^2 >= h_min}] = 2 phi(a/s)/(s a) - 2 Phi(-a/s)/s^2
  const double phi = std::exp(-model.h_min / (2.0 * s * s)) /
                     (std::sqrt(2.0 * std::numbers::pi) * s);
  const double restricted = 2.0 * phi / a - 2.0 * normal_cdf(-a / s) / (s * s);
  const double acceptance = 2.0 * normal_cdf(-a / s);
  return restricted / acceptance;
}

ScalingFactor scaling_factor(int participants, double power, double mu, int k,
                             int d, double sigma_client) {
  if (participants < 1 || !(power > 0.0) || !(mu > 0.0) || k < 2 || d < 1 ||
      sigma_client < 0.0) {
    throw std::invalid_argument("scaling_factor: invalid arguments");
  }
  const double payload_bound = 1.0 - 1.0 / static_cast<double>(k) +
                               static_cast<double>(d) * sigma_client *
                                   sigma_client;
  return ScalingFactor{
      participants * std::sqrt(power / (mu * payload_bound)), mu, participants};
}

double snr_to_noise_std(double snr_db, double power) {
  if (!(power > 0.0)) {
    throw std::invalid_argument("snr_to_noise_std: power must be > 0");
  }
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

PowerConstraint make_power_constraint(double power, double snr_db) {
  return PowerConstraint{power, snr_db, snr_to_noise_std(snr_db, power)};
}

double sample_gain(const FadingModel& model, RngStream& rng) {
  if (model.h_min <= 0.0 || !(model.sigma_h > 0.0)) {
    throw std::invalid_argument("sample_gain: need sigma_h > 0 and h_min > 0");
  }
  const double acceptance =
      2.0 * normal_cdf(-std::sqrt(model.h_min) / model.sigma_h);
  if (acceptance < 1e-6) {
    std::ostringstream msg;
    msg << "sample_gain: acceptance probability " << acceptance
        << " below 1e-6; h_min = " << model.h_min << " is too high for sigma_h "
        << model.sigma_h;
    throw std::runtime_error(msg.str());
  }
  for (;;) {
    const double h = model.sigma_h * rng.next_gaussian();
    if (h * h >= model.h_min) return h;
  }
}

std::vector<double> transmit_mac(
    const std::vector<std::pair<int, std::vector<double>>>& signals,
    const ChannelRealization& realization) {
  std::vector<double> received = realization.awgn;
  for (const auto& [client, signal] : signals) {
    const auto it = std::find_if(
        realization.gains.begin(), realization.gains.end(),
        [client](const auto& g) { return g.first == client; });
    if (it == realization.gains.end()) {
      std::ostringstream msg;
      msg << "transmit_mac: no gain for client " << client;
      throw std::invalid_argument(msg.str());
    }
    if (signal.size() != received.size()) {
      throw std::invalid_argument("transmit_mac: signal length mismatch");
    }
    kern::ops().axpy(it->second, signal.data(), received.data(),
                     received.size());
  }
  return received;
}

}  // namespace airfer::channel
