#include "airfer/projection.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "airfer/kernels.hpp"
#include "airfer/rng.hpp"

namespace airfer::projection {
namespace {

void validate(const ProjectionSpec& spec) {
  if (spec.d < 1) throw std::invalid_argument("projection: d must be >= 1");
  if (spec.k < 2) throw std::invalid_argument("projection: k must be >= 2");
  if (spec.kind == Kind::kIdentity && spec.d != spec.k) {
    throw std::invalid_argument("identity projection requires d == k");
  }
}

ProjectionMatrix sample_orthogonal(const ProjectionSpec& spec) {
  const int c = std::max(spec.d, spec.k);
  RngStream rng = derive_stream(spec.seed, 0x50524f4a /* stream tag */);
  Eigen::MatrixXd m(c, c);
  // column-major fill order is part of the determinism contract
  for (int col = 0; col < c; ++col) {
    for (int row = 0; row < c; ++row) m(row, col) = rng.next_gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int col = 0; col < c; ++col) {
    if (r(col, col) < 0.0) q.col(col) = -q.col(col);  // sign(0) stays +1
  }
  ProjectionMatrix out{std::vector<double>(
                           static_cast<size_t>(spec.d) * spec.k),
                       spec};
  for (int row = 0; row < spec.d; ++row) {
    for (int col = 0; col < spec.k; ++col) {
      out.entries[row * spec.k + col] = q(row, col);
    }
  }
  return out;
}

ProjectionMatrix sample_iid(const ProjectionSpec& spec) {
  RngStream rng = derive_stream(spec.seed, 0x50524f4a);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.d));
  ProjectionMatrix out{std::vector<double>(
                           static_cast<size_t>(spec.d) * spec.k),
                       spec};
  for (double& e : out.entries) {
    if (spec.kind == Kind::kGaussian) {
      e = scale * rng.next_gaussian();
    } else {
      e = (rng.next_u64() & 1) ? scale : -scale;
    }
  }
  return out;
}

}  // namespace

ProjectionMatrix sample_projection(const ProjectionSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case Kind::kOrthogonal:
      return sample_orthogonal(spec);
    case Kind::kGaussian:
    case Kind::kRademacher:
      return sample_iid(spec);
    case Kind::kIdentity: {
      ProjectionMatrix out{std::vector<double>(
                               static_cast<size_t>(spec.d) * spec.k, 0.0),
                           spec};
      for (int i = 0; i < spec.k; ++i) out.entries[i * spec.k + i] = 1.0;
      return out;
    }
  }
  throw std::invalid_argument("unknown projection kind");
}

std::vector<double> project(const ProjectionMatrix& P,
                            const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != P.spec.k) {
    throw std::invalid_argument("project: vector length must equal k");
  }
  std::vector<double> out(P.spec.d);
  kern::ops().matvec(P.entries.data(), P.spec.d, P.spec.k, v.data(),
                     out.data());
  return out;
}

std::vector<double> decode(const ProjectionMatrix& P,
                           const std::vector<double>& z, double gamma) {
  if (static_cast<int>(z.size()) != P.spec.d) {
    throw std::invalid_argument("decode: vector length must equal d");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("decode: gamma must be > 0");
  std::vector<double> out(P.spec.k);
  kern::ops().matvec_t(P.entries.data(), P.spec.d, P.spec.k, z.data(),
                       out.data());
  kern::ops().scale(1.0 / gamma, out.data(), out.size());
  return out;
}

}  // namespace airfer::projection
