#include "airfer/kernels.hpp"

namespace airfer::kern {
namespace {

double dot_scalar(const double* x, const double* y, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_scalar(const double* x, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= a;
}

void matvec_scalar(const double* A, size_t rows, size_t cols, const double* x,
                   double* y) {
  for (size_t r = 0; r < rows; ++r) y[r] = dot_scalar(A + r * cols, x, cols);
}

void matvec_t_scalar(const double* A, size_t rows, size_t cols,
                     const double* x, double* y) {
  for (size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (size_t r = 0; r < rows; ++r) axpy_scalar(x[r], A + r * cols, y, cols);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{dot_scalar,  sum_scalar,    axpy_scalar,
                         scale_scalar, matvec_scalar, matvec_t_scalar};
  return table;
}

}  // namespace airfer::kern
