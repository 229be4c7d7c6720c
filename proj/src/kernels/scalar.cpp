#include "spikebench/kernels.hpp"

namespace spikebench::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double recip_sum(double x, const double* t, const double* w, std::size_t n) {
  double s = 0.0;
  if (w) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] / (x - t[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) s += 1.0 / (x - t[i]);
  }
  return s;
}

void gemv(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * cols, x, cols);
}

void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], A + r * cols, y, cols);
}

}  // namespace

const Table& scalar() {
  static const Table t{"scalar", dot, axpy, axpby, recip_sum, gemv, gemv_t};
  return t;
}

}  // namespace spikebench::kernels
