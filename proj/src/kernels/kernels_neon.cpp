// NEON variants for aarch64, where the vector extension is baseline. Same
// loop structure as the AVX2 file, two doubles per lane group.

#include "airfer/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace airfer::kern {
namespace {

double dot_neon(const double* x, const double* y, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return vaddvq_f64(acc) + tail;
}

double sum_neon(const double* x, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return vaddvq_f64(acc) + tail;
}

void axpy_neon(double a, const double* x, double* y, size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_neon(double a, double* x, size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void matvec_neon(const double* A, size_t rows, size_t cols, const double* x,
                 double* y) {
  for (size_t r = 0; r < rows; ++r) y[r] = dot_neon(A + r * cols, x, cols);
}

void matvec_t_neon(const double* A, size_t rows, size_t cols, const double* x,
                   double* y) {
  for (size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (size_t r = 0; r < rows; ++r) axpy_neon(x[r], A + r * cols, y, cols);
}

}  // namespace

const Ops& neon_ops() {
  static const Ops table{dot_neon,  sum_neon,    axpy_neon,
                         scale_neon, matvec_neon, matvec_t_neon};
  return table;
}

}  // namespace airfer::kern

#endif  // aarch64
