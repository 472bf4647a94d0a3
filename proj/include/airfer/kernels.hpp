#pragma once

#include <cstddef>

namespace airfer::kern {

// Data-parallel inner loops of the simulator. Scalar reference
// implementations always exist; an AVX2/FMA variant (x86-64) or NEON
// variant (aarch64) is selected at runtime. Override with
// AIRFER_KERNEL=scalar|avx2|neon. Variants are equivalence-tested against
// the scalar reference.
struct Ops {
  double (*dot)(const double* x, const double* y, size_t n);
  double (*sum)(const double* x, size_t n);
  void (*axpy)(double a, const double* x, double* y, size_t n);  // y += a*x
  void (*scale)(double a, double* x, size_t n);                  // x *= a
  // Row-major A (rows x cols): y = A*x and y = A^T*x. y is overwritten.
  void (*matvec)(const double* A, size_t rows, size_t cols, const double* x,
                 double* y);
  void (*matvec_t)(const double* A, size_t rows, size_t cols, const double* x,
                   double* y);
};

const Ops& scalar_ops();
const Ops& ops();                  // runtime-selected
const char* active_kernel_name();  // "scalar", "avx2" or "neon"

}  // namespace airfer::kern
