#include "airfer/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "airfer/kernels.hpp"

namespace airfer::pipeline {
namespace {

// stream purpose tags
constexpr uint64_t kTagParticipation = 1;
constexpr uint64_t kTagGain = 2;
constexpr uint64_t kTagAwgn = 3;
constexpr uint64_t kTagPrivacyNoise = 4;
constexpr uint64_t kTagRr = 5;

double client_sigma(const RoundConfig& cfg, int participants,
                    bool shared_noise) {
  if (!cfg.privacy_spec.has_value()) return 0.0;
  if (!shared_noise) return cfg.privacy_spec->sigma_total;
  return privacy::client_noise_share(*cfg.privacy_spec, participants)
      .sigma_client;
}

std::vector<double> draw_awgn(int d, double noise_std, RngStream&& rng) {
  std::vector<double> n(d, 0.0);
  if (noise_std > 0.0) {
    for (double& v : n) v = noise_std * rng.next_gaussian();
  }
  return n;
}

const fusion::BeliefVector& belief_for(const BeliefView& beliefs, int client) {
  if (client >= static_cast<int>(beliefs.size()) ||
      beliefs[client] == nullptr) {
    throw std::invalid_argument("round: missing belief for participant " +
                                std::to_string(client));
  }
  return *beliefs[client];
}

std::vector<double> client_payload(const BeliefView& beliefs,
                                   const std::vector<fusion::ClassWeights>& w,
                                   const RoundConfig& cfg, int client) {
  static const fusion::ClassWeights kNoWeights{};
  const fusion::ClassWeights& cw =
      cfg.method == fusion::Method::kWba ? w.at(client) : kNoWeights;
  std::vector<double> fused =
      fusion::fuse(cfg.method, belief_for(beliefs, client), cw);
  if (cfg.method == fusion::Method::kWba) {
    // transmit the normalized weighted beliefs: the raw product sums to
    // ~1/k and would otherwise drown in channel noise at the common gamma
    double total = 0.0;
    for (double v : fused) total += v;
    if (total > 0.0) {
      for (double& v : fused) v /= total;
    }
  }
  return fusion::mean_center(fused).payload;
}

// gamma for this round; the power calibration moment is the exact
// conditional E[1/h^2 | h^2 >= h_min] of the rejection-sampled gains, which
// is what makes the realized average transmit power meet the budget.
channel::ScalingFactor round_scaling(const RoundConfig& cfg, int participants,
                                     double sigma_client) {
  const double mu = channel::truncated_inv_sq_moment(cfg.fading);
  return channel::scaling_factor(participants, cfg.power.power, mu, cfg.k,
                                 cfg.d, sigma_client);
}

struct TransmitResult {
  std::vector<double> decoded;
  double mean_tx_power = 0.0;
};

// Shared-channel path: y_i = gamma * P * g_i / (|P_t| h_i), all superposed.
TransmitResult transmit_superposed(
    const std::vector<std::vector<double>>& payloads,
    const std::vector<int>& participants, const RoundConfig& cfg,
    const projection::ProjectionMatrix& P, const RoundKey& key, double gamma,
    double sigma_client) {
  const int m = static_cast<int>(participants.size());
  channel::ChannelRealization realization;
  realization.gains.reserve(m);
  for (int client : participants) {
    RngStream gain_rng = derive_stream(key.round_master, kTagGain,
                                       static_cast<uint64_t>(client));
    realization.gains.emplace_back(client,
                                   channel::sample_gain(cfg.fading, gain_rng));
  }
  realization.awgn = draw_awgn(cfg.d, cfg.power.noise_std,
                               derive_stream(key.round_master, kTagAwgn));

  std::vector<std::pair<int, std::vector<double>>> signals;
  signals.reserve(m);
  double power_acc = 0.0;
  for (int idx = 0; idx < m; ++idx) {
    const int client = participants[idx];
    const double h = realization.gains[idx].second;
    std::vector<double> y;
    if (cfg.noise_placement == NoisePlacement::kBeforeProjection) {
      RngStream noise_rng = derive_stream(key.round_master, kTagPrivacyNoise,
                                          static_cast<uint64_t>(client));
      const std::vector<double> g =
          privacy::add_privacy_noise(payloads[idx], sigma_client, noise_rng);
      y = projection::project(P, g);
      kern::ops().scale(gamma / (m * h), y.data(), y.size());
    } else {
      y = projection::project(P, payloads[idx]);
      kern::ops().scale(gamma, y.data(), y.size());
      if (sigma_client > 0.0) {
        RngStream noise_rng = derive_stream(key.round_master, kTagPrivacyNoise,
                                            static_cast<uint64_t>(client));
        for (double& v : y) v += sigma_client * noise_rng.next_gaussian();
      }
      kern::ops().scale(1.0 / (m * h), y.data(), y.size());
    }
    power_acc += kern::ops().dot(y.data(), y.data(), y.size());
    signals.emplace_back(client, std::move(y));
  }
  const std::vector<double> z = channel::transmit_mac(signals, realization);
  return TransmitResult{projection::decode(P, z, gamma), power_acc / m};
}

// Dedicated-block path: per participant its own gain and AWGN block, gamma
// evaluated at |P_t| = 1; the server averages the per-block decodes.
TransmitResult transmit_per_block(
    const std::vector<std::vector<double>>& payloads,
    const std::vector<int>& participants, const RoundConfig& cfg,
    const projection::ProjectionMatrix& P, const RoundKey& key, double gamma,
    double sigma_client) {
  const int m = static_cast<int>(participants.size());
  std::vector<double> average(cfg.k, 0.0);
  double power_acc = 0.0;
  for (int idx = 0; idx < m; ++idx) {
    const int client = participants[idx];
    RngStream gain_rng = derive_stream(key.round_master, kTagGain,
                                       static_cast<uint64_t>(client));
    const double h = channel::sample_gain(cfg.fading, gain_rng);

    std::vector<double> y;
    if (cfg.noise_placement == NoisePlacement::kBeforeProjection) {
      RngStream noise_rng = derive_stream(key.round_master, kTagPrivacyNoise,
                                          static_cast<uint64_t>(client));
      const std::vector<double> g =
          privacy::add_privacy_noise(payloads[idx], sigma_client, noise_rng);
      y = projection::project(P, g);
      kern::ops().scale(gamma / h, y.data(), y.size());
    } else {
      y = projection::project(P, payloads[idx]);
      kern::ops().scale(gamma, y.data(), y.size());
      if (sigma_client > 0.0) {
        RngStream noise_rng = derive_stream(key.round_master, kTagPrivacyNoise,
                                            static_cast<uint64_t>(client));
        for (double& v : y) v += sigma_client * noise_rng.next_gaussian();
      }
      kern::ops().scale(1.0 / h, y.data(), y.size());
    }
    power_acc += kern::ops().dot(y.data(), y.data(), y.size());

    channel::ChannelRealization realization;
    realization.gains.emplace_back(client, h);
    realization.awgn =
        draw_awgn(cfg.d, cfg.power.noise_std,
                  derive_stream(key.round_master, kTagAwgn,
                                static_cast<uint64_t>(client) + 1));
    std::vector<std::pair<int, std::vector<double>>> signals;
    signals.emplace_back(client, std::move(y));
    const std::vector<double> z = channel::transmit_mac(signals, realization);
    const std::vector<double> decoded = projection::decode(P, z, gamma);
    kern::ops().axpy(1.0 / m, decoded.data(), average.data(), average.size());
  }
  return TransmitResult{std::move(average), power_acc / m};
}

RoundTrace finish_round(TransmitResult&& tx, ParticipationOutcome&& outcome,
                        int symbols, double gamma, double sigma_client) {
  RoundTrace trace;
  trace.decoded = std::move(tx.decoded);
  trace.decision = fusion::argmax_lowest(trace.decoded);
  trace.participants = std::move(outcome);
  trace.diag = RoundDiagnostics{symbols, gamma, sigma_client,
                                tx.mean_tx_power};
  return trace;
}

}  // namespace

RoundKey make_round_key(uint64_t master_seed, uint64_t arm_id, uint64_t seed,
                        uint64_t round_index) {
  uint64_t h = mix64(master_seed);
  h = mix64(h ^ arm_id);
  h = mix64(h ^ seed);
  h = mix64(h ^ round_index);
  return RoundKey{h};
}

ParticipationOutcome sample_participants(int n, double p, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_participants: n must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sample_participants: p must be in (0, 1]");
  }
  ParticipationOutcome outcome;
  for (;;) {
    outcome.participants.clear();
    for (int i = 0; i < n; ++i) {
      if (rng.next_unit() < p) outcome.participants.push_back(i);
    }
    if (!outcome.participants.empty()) return outcome;
  }
}

RoundTrace oac_round(const BeliefView& beliefs,
                     const std::vector<fusion::ClassWeights>& weights,
                     const RoundConfig& cfg,
                     const projection::ProjectionMatrix& P,
                     const RoundKey& key) {
  RngStream part_rng = derive_stream(key.round_master, kTagParticipation);
  ParticipationOutcome outcome = sample_participants(cfg.n, cfg.p, part_rng);
  const int m = static_cast<int>(outcome.participants.size());
  const double sigma_client = client_sigma(cfg, m, /*shared_noise=*/true);
  const channel::ScalingFactor sf = round_scaling(cfg, m, sigma_client);

  std::vector<std::vector<double>> payloads;
  payloads.reserve(m);
  for (int client : outcome.participants) {
    payloads.push_back(client_payload(beliefs, weights, cfg, client));
  }
  TransmitResult tx = transmit_superposed(payloads, outcome.participants, cfg,
                                          P, key, sf.gamma, sigma_client);
  return finish_round(std::move(tx), std::move(outcome), cfg.d, sf.gamma,
                      sigma_client);
}

RoundTrace orthogonal_round(const BeliefView& beliefs,
                            const std::vector<fusion::ClassWeights>& weights,
                            const RoundConfig& cfg,
                            const projection::ProjectionMatrix& P,
                            const RoundKey& key) {
  RngStream part_rng = derive_stream(key.round_master, kTagParticipation);
  ParticipationOutcome outcome = sample_participants(cfg.n, cfg.p, part_rng);
  const int m = static_cast<int>(outcome.participants.size());
  const double sigma_client = client_sigma(cfg, m, /*shared_noise=*/false);
  const channel::ScalingFactor sf = round_scaling(cfg, 1, sigma_client);

  std::vector<std::vector<double>> payloads;
  payloads.reserve(m);
  for (int client : outcome.participants) {
    payloads.push_back(client_payload(beliefs, weights, cfg, client));
  }
  TransmitResult tx = transmit_per_block(payloads, outcome.participants, cfg,
                                         P, key, sf.gamma, sigma_client);
  return finish_round(std::move(tx), std::move(outcome), m * cfg.d, sf.gamma,
                      sigma_client);
}

RoundTrace best_client_round(const BeliefView& beliefs, int best_client,
                             const std::vector<fusion::ClassWeights>& weights,
                             const RoundConfig& cfg,
                             const projection::ProjectionMatrix& P,
                             const RoundKey& key) {
  if (best_client < 0 || best_client >= cfg.n) {
    throw std::invalid_argument("best_client_round: invalid client index");
  }
  ParticipationOutcome outcome;
  outcome.participants.push_back(best_client);
  const double sigma_client = client_sigma(cfg, 1, /*shared_noise=*/false);
  const channel::ScalingFactor sf = round_scaling(cfg, 1, sigma_client);
  std::vector<std::vector<double>> payloads;
  payloads.push_back(client_payload(beliefs, weights, cfg, best_client));
  TransmitResult tx = transmit_per_block(payloads, outcome.participants, cfg,
                                         P, key, sf.gamma, sigma_client);
  return finish_round(std::move(tx), std::move(outcome), cfg.d, sf.gamma,
                      sigma_client);
}

RoundTrace rr_round(const std::vector<int>& labels, const RoundConfig& cfg,
                    const projection::ProjectionMatrix& P,
                    const RoundKey& key) {
  if (cfg.method != fusion::Method::kMv) {
    throw std::invalid_argument(
        "randomized response requires the majority-voting method");
  }
  RngStream part_rng = derive_stream(key.round_master, kTagParticipation);
  ParticipationOutcome outcome = sample_participants(cfg.n, cfg.p, part_rng);
  const int m = static_cast<int>(outcome.participants.size());

  const bool private_round = cfg.privacy_spec.has_value();
  const double rr_epsilon =
      private_round ? cfg.privacy_spec->budget.epsilon_target : 0.0;

  std::vector<std::vector<double>> payloads;
  payloads.reserve(m);
  for (int client : outcome.participants) {
    if (client >= static_cast<int>(labels.size())) {
      throw std::invalid_argument("rr_round: missing label for participant");
    }
    int vote = labels[client];
    if (private_round) {
      RngStream rr_rng = derive_stream(key.round_master, kTagRr,
                                       static_cast<uint64_t>(client));
      vote = privacy::rr_perturb(vote, rr_epsilon, cfg.k, rr_rng);
    }
    std::vector<double> one_hot(cfg.k, 0.0);
    one_hot[vote] = 1.0;
    payloads.push_back(fusion::mean_center(one_hot).payload);
  }

  // RR adds no Gaussian noise; gamma is calibrated at sigma_client = 0.
  if (cfg.scheme == Scheme::kRrOac) {
    const channel::ScalingFactor sf = round_scaling(cfg, m, 0.0);
    TransmitResult tx = transmit_superposed(payloads, outcome.participants,
                                            cfg, P, key, sf.gamma, 0.0);
    return finish_round(std::move(tx), std::move(outcome), cfg.d, sf.gamma,
                        0.0);
  }
  const channel::ScalingFactor sf = round_scaling(cfg, 1, 0.0);
  TransmitResult tx = transmit_per_block(payloads, outcome.participants, cfg,
                                         P, key, sf.gamma, 0.0);
  return finish_round(std::move(tx), std::move(outcome), m * cfg.d, sf.gamma,
                      0.0);
}

RoundTrace run_round(const BeliefView& beliefs,
                     const std::vector<fusion::ClassWeights>& weights,
                     const std::vector<int>& labels, int best_client,
                     const RoundConfig& cfg,
                     const projection::ProjectionMatrix& P,
                     const RoundKey& key) {
  switch (cfg.scheme) {
    case Scheme::kOac:
      return oac_round(beliefs, weights, cfg, P, key);
    case Scheme::kOrthogonal:
      return orthogonal_round(beliefs, weights, cfg, P, key);
    case Scheme::kBestClient:
      return best_client_round(beliefs, best_client, weights, cfg, P, key);
    case Scheme::kRrOac:
    case Scheme::kRrOrthogonal:
      return rr_round(labels, cfg, P, key);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace airfer::pipeline
