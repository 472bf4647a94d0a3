#pragma once

#include <array>
#include <cstdint>

namespace airfer {

// splitmix64 finalizer; used both for seeding and for key derivation.
uint64_t mix64(uint64_t x);

/// Deterministic xoshiro256++ stream with a Box-Muller Gaussian source.
///
/// Every random quantity in the simulator is drawn from a stream derived
/// from the master seed and a fixed purpose/index path, so results do not
/// depend on thread scheduling or evaluation order.
class RngStream {
 public:
  explicit RngStream(uint64_t seed);

  uint64_t next_u64();
  double next_unit();          // uniform in [0, 1)
  double next_gaussian();      // standard normal
  int next_int(int bound);     // uniform in [0, bound)

 private:
  std::array<uint64_t, 4> state_;
  double cached_gauss_ = 0.0;
  bool has_cached_ = false;
};

/// Derives an independent substream from a master seed and up to four
/// path components (purpose tag, arm/seed/round/client indices).
RngStream derive_stream(uint64_t master, uint64_t a, uint64_t b = 0,
                        uint64_t c = 0, uint64_t d = 0);

}  // namespace airfer
