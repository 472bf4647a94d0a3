#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "airfer/channel.hpp"
#include "airfer/fusion.hpp"
#include "airfer/privacy.hpp"
#include "airfer/projection.hpp"
#include "airfer/rng.hpp"

namespace airfer::pipeline {

enum class Scheme { kOac, kOrthogonal, kBestClient, kRrOac, kRrOrthogonal };

enum class NoisePlacement { kBeforeProjection, kAfterProjection };

struct RoundConfig {
  int n = 0;
  double p = 1.0;
  int k = 0;
  int d = 0;
  fusion::Method method = fusion::Method::kBa;
  Scheme scheme = Scheme::kOac;
  NoisePlacement noise_placement = NoisePlacement::kBeforeProjection;
  std::optional<privacy::PrivacySpec> privacy_spec;  // nullopt: non-private
  projection::ProjectionSpec projection_spec{};
  channel::FadingModel fading{1.0, 0.2};
  channel::PowerConstraint power{1.0, 0.0, 1.0};
  uint64_t master_seed = 0;
};

/// Identifies one round's randomness. All streams inside a round derive
/// from round_master plus a purpose tag, so rounds can run on any thread in
/// any order with bit-identical results.
struct RoundKey {
  uint64_t round_master;
};

RoundKey make_round_key(uint64_t master_seed, uint64_t arm_id, uint64_t seed,
                        uint64_t round_index);

struct ParticipationOutcome {
  std::vector<int> participants;  // ascending client indices, never empty
};

struct RoundDiagnostics {
  int symbols_used = 0;
  double gamma = 0.0;
  double sigma_client = 0.0;
  double mean_tx_power = 0.0;  // average ||y_i||^2 over participants
};

struct RoundTrace {
  std::vector<double> decoded;
  int decision = -1;
  ParticipationOutcome participants;
  RoundDiagnostics diag;
};

/// Bernoulli(p) per client, resampled wholesale until someone participates.
ParticipationOutcome sample_participants(int n, double p, RngStream& rng);

// Belief vectors indexed by client id; entries for non-participants may be
// null except where a scheme needs them.
using BeliefView = std::vector<const fusion::BeliefVector*>;

/// Superposed round: fuse + center, add the per-client noise share, scale by
/// gamma/(|P_t| h_i), project, sum over the air, decode with (1/gamma) P^T.
RoundTrace oac_round(const BeliefView& beliefs,
                     const std::vector<fusion::ClassWeights>& weights,
                     const RoundConfig& cfg,
                     const projection::ProjectionMatrix& P,
                     const RoundKey& key);

/// Every participant gets a dedicated block (own AWGN, gamma computed at
/// |P_t| = 1, full-sigma privacy noise since each signal is individually
/// observed); the server decodes blocks separately and averages.
RoundTrace orthogonal_round(const BeliefView& beliefs,
                            const std::vector<fusion::ClassWeights>& weights,
                            const RoundConfig& cfg,
                            const projection::ProjectionMatrix& P,
                            const RoundKey& key);

/// The pre-selected best client transmits alone with full-sigma noise.
/// Selection is per experiment, not per round; see eval::select_best_client.
RoundTrace best_client_round(const BeliefView& beliefs, int best_client,
                             const std::vector<fusion::ClassWeights>& weights,
                             const RoundConfig& cfg,
                             const projection::ProjectionMatrix& P,
                             const RoundKey& key);

/// Randomized-response round (majority voting only): each participant's vote
/// is RR-perturbed, one-hot encoded, centered, and sent with no Gaussian
/// noise through the superposed or per-block path.
RoundTrace rr_round(const std::vector<int>& labels, const RoundConfig& cfg,
                    const projection::ProjectionMatrix& P,
                    const RoundKey& key);

/// Dispatches on cfg.scheme. labels are the clients' local argmax votes
/// (used by RR schemes); best_client is required for the best-client scheme.
RoundTrace run_round(const BeliefView& beliefs,
                     const std::vector<fusion::ClassWeights>& weights,
                     const std::vector<int>& labels, int best_client,
                     const RoundConfig& cfg,
                     const projection::ProjectionMatrix& P,
                     const RoundKey& key);

}  // namespace airfer::pipeline
