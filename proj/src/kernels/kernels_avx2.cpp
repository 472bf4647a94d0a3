// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma on
// x86-64 only; the dispatcher never calls into it unless the CPU reports
// AVX2 support.

#include "airfer/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace airfer::kern {
namespace {

inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* x, const double* y, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hsum256(acc) + tail;
}

double sum_avx2(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return hsum256(acc) + tail;
}

void axpy_avx2(double a, const double* x, double* y, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void matvec_avx2(const double* A, size_t rows, size_t cols, const double* x,
                 double* y) {
  for (size_t r = 0; r < rows; ++r) y[r] = dot_avx2(A + r * cols, x, cols);
}

void matvec_t_avx2(const double* A, size_t rows, size_t cols, const double* x,
                   double* y) {
  for (size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (size_t r = 0; r < rows; ++r) axpy_avx2(x[r], A + r * cols, y, cols);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table{dot_avx2,  sum_avx2,    axpy_avx2,
                         scale_avx2, matvec_avx2, matvec_t_avx2};
  return table;
}

}  // namespace airfer::kern

#endif  // x86-64
