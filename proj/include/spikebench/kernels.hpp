#pragma once

#include <cstddef>
#include <string_view>

namespace spikebench::kernels {

// Flat dense primitives. Every backend must agree with the scalar one up to
// summation-order rounding.
struct Table {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = a * x + b * y
  void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
  // sum_k w_k / (x - t_k); w may be null (unit weights)
  double (*recip_sum)(double x, const double* t, const double* w, std::size_t n);
  // row-major A (rows x cols): y = A x
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  // row-major A (rows x cols): y = A^T x
  void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const Table& scalar();
// nullptr when the backend is not compiled in or the CPU lacks it.
const Table* avx2();
const Table* neon();

// Chosen once per process. SPIKEBENCH_KERNELS=scalar|avx2|neon overrides.
const Table& active();

}  // namespace spikebench::kernels
