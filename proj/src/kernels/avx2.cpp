#include "spikebench/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#define SB_AVX2 __attribute__((target("avx2,fma")))

namespace spikebench::kernels {
namespace {

SB_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

SB_AVX2 double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

SB_AVX2 void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

SB_AVX2 void axpby(double a, const double* x, double b, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

SB_AVX2 double recip_sum(double x, const double* t, const double* w, std::size_t n) {
  const __m256d vx = _mm256_set1_pd(x);
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  if (w) {
    for (; i + 8 <= n; i += 8) {
      s0 = _mm256_add_pd(s0, _mm256_div_pd(_mm256_loadu_pd(w + i),
                                           _mm256_sub_pd(vx, _mm256_loadu_pd(t + i))));
      s1 = _mm256_add_pd(s1, _mm256_div_pd(_mm256_loadu_pd(w + i + 4),
                                           _mm256_sub_pd(vx, _mm256_loadu_pd(t + i + 4))));
    }
  } else {
    const __m256d one = _mm256_set1_pd(1.0);
    for (; i + 8 <= n; i += 8) {
      s0 = _mm256_add_pd(s0, _mm256_div_pd(one, _mm256_sub_pd(vx, _mm256_loadu_pd(t + i))));
      s1 = _mm256_add_pd(s1, _mm256_div_pd(one, _mm256_sub_pd(vx, _mm256_loadu_pd(t + i + 4))));
    }
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += (w ? w[i] : 1.0) / (x - t[i]);
  return s;
}

SB_AVX2 void gemv(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * cols, x, cols);
}

// Four rows per sweep keeps y in cache for wide matrices.
SB_AVX2 void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* a0 = A + r * cols;
    const double* a1 = a0 + cols;
    const double* a2 = a1 + cols;
    const double* a3 = a2 + cols;
    const __m256d x0 = _mm256_set1_pd(x[r]), x1 = _mm256_set1_pd(x[r + 1]);
    const __m256d x2 = _mm256_set1_pd(x[r + 2]), x3 = _mm256_set1_pd(x[r + 3]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      __m256d acc = _mm256_loadu_pd(y + c);
      acc = _mm256_fmadd_pd(x0, _mm256_loadu_pd(a0 + c), acc);
      acc = _mm256_fmadd_pd(x1, _mm256_loadu_pd(a1 + c), acc);
      acc = _mm256_fmadd_pd(x2, _mm256_loadu_pd(a2 + c), acc);
      acc = _mm256_fmadd_pd(x3, _mm256_loadu_pd(a3 + c), acc);
      _mm256_storeu_pd(y + c, acc);
    }
    for (; c < cols; ++c) y[c] += x[r] * a0[c] + x[r + 1] * a1[c] + x[r + 2] * a2[c] + x[r + 3] * a3[c];
  }
  for (; r < rows; ++r) axpy(x[r], A + r * cols, y, cols);
}

}  // namespace

const Table* avx2() {
  static const Table t{"avx2", dot, axpy, axpby, recip_sum, gemv, gemv_t};
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &t;
  return nullptr;
}

}  // namespace spikebench::kernels

#else

namespace spikebench::kernels {
const Table* avx2() { return nullptr; }
}  // namespace spikebench::kernels

#endif
