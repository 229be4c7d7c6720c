#include "spikebench/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace spikebench::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
    s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, const double* x, double b, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a), vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vmulq_f64(vb, vld1q_f64(y + i)), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double recip_sum(double x, const double* t, const double* w, std::size_t n) {
  const float64x2_t vx = vdupq_n_f64(x);
  float64x2_t s = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t num = w ? vld1q_f64(w + i) : vdupq_n_f64(1.0);
    s = vaddq_f64(s, vdivq_f64(num, vsubq_f64(vx, vld1q_f64(t + i))));
  }
  double r = vaddvq_f64(s);
  for (; i < n; ++i) r += (w ? w[i] : 1.0) / (x - t[i]);
  return r;
}

void gemv(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * cols, x, cols);
}

void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], A + r * cols, y, cols);
}

}  // namespace

const Table* neon() {
  static const Table t{"neon", dot, axpy, axpby, recip_sum, gemv, gemv_t};
  return &t;
}

}  // namespace spikebench::kernels

#else

namespace spikebench::kernels {
const Table* neon() { return nullptr; }
}  // namespace spikebench::kernels

#endif
