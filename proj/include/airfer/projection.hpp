#pragma once

#include <cstdint>
#include <vector>

namespace airfer::projection {

enum class Kind { kOrthogonal, kGaussian, kRademacher, kIdentity };

struct ProjectionSpec {
  Kind kind;
  int d;  // channel symbols per round
  int k;  // classes
  uint64_t seed;
};

/// Dense row-major d x k projection shared by every client. Immutable after
/// construction.
struct ProjectionMatrix {
  std::vector<double> entries;  // row-major, d rows, k columns
  ProjectionSpec spec;

  double at(int row, int col) const { return entries[row * spec.k + col]; }
};

/// Samples the shared projection. Orthogonal: QR of a c x c standard-normal
/// matrix (c = max(d, k)) with columns sign-corrected by the diagonal of R
/// (sign(0) := +1), truncated to d x k. Gaussian/Rademacher entries are
/// scaled by 1/sqrt(d). Identity requires d == k. Deterministic per seed.
ProjectionMatrix sample_projection(const ProjectionSpec& spec);

/// P * v, v of length k.
std::vector<double> project(const ProjectionMatrix& P,
                            const std::vector<double>& v);

/// (1/gamma) * P^T * z, z of length d.
std::vector<double> decode(const ProjectionMatrix& P,
                           const std::vector<double>& z, double gamma);

}  // namespace airfer::projection
