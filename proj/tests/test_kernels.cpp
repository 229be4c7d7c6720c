#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spikebench/kernels.hpp"

using namespace spikebench::kernels;

namespace {

std::vector<double> randv(std::mt19937_64& g, std::size_t n, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

std::vector<const Table*> backends() {
  std::vector<const Table*> out;
  if (avx2()) out.push_back(avx2());
  if (neon()) out.push_back(neon());
  return out;
}

// Reassociated sums differ from the scalar loop by O(n eps sum|terms|).
double tol(std::size_t n, double mag) { return 4.0 * static_cast<double>(n + 1) * 1e-16 * mag + 1e-300; }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("active table is one of the compiled backends") {
    const Table& t = active();
    CHECK((t.name == "scalar" || t.name == "avx2" || t.name == "neon"));
  }

  TEST_CASE("simd dot, axpy, axpby match scalar on ragged sizes") {
    std::mt19937_64 g(11);
    for (const Table* b : backends()) {
      CAPTURE(b->name);
      for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 63u, 1000u, 1001u}) {
        auto x = randv(g, n), y = randv(g, n);
        double mag = 0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
        CHECK(std::abs(b->dot(x.data(), y.data(), n) - scalar().dot(x.data(), y.data(), n)) <= tol(n, mag));

        auto y1 = y, y2 = y;
        b->axpy(0.37, x.data(), y1.data(), n);
        scalar().axpy(0.37, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

        y1 = y, y2 = y;
        b->axpby(-1.5, x.data(), 0.25, y1.data(), n);
        scalar().axpby(-1.5, x.data(), 0.25, y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (std::abs(y2[i]) + 2));
      }
    }
  }

  TEST_CASE("simd recip_sum matches scalar with and without weights") {
    std::mt19937_64 g(12);
    for (const Table* b : backends()) {
      CAPTURE(b->name);
      for (std::size_t n : {1u, 5u, 8u, 13u, 257u, 4099u}) {
        auto t = randv(g, n, 0, 3), w = randv(g, n, 0, 1);
        const double x = 3.5;
        double mag = 0, magw = 0;
        for (std::size_t i = 0; i < n; ++i) mag += 1 / (x - t[i]), magw += w[i] / (x - t[i]);
        CHECK(std::abs(b->recip_sum(x, t.data(), nullptr, n) - scalar().recip_sum(x, t.data(), nullptr, n)) <=
              tol(n, mag));
        CHECK(std::abs(b->recip_sum(x, t.data(), w.data(), n) - scalar().recip_sum(x, t.data(), w.data(), n)) <=
              tol(n, magw));
      }
    }
  }

  TEST_CASE("simd gemv and gemv_t match scalar") {
    std::mt19937_64 g(13);
    for (const Table* b : backends()) {
      CAPTURE(b->name);
      for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {3, 5}, {4, 4}, {7, 9}, {33, 65}, {120, 201}}) {
        auto A = randv(g, r * c), x = randv(g, c), z = randv(g, r);
        std::vector<double> y1(r), y2(r), w1(c), w2(c);
        b->gemv(A.data(), r, c, x.data(), y1.data());
        scalar().gemv(A.data(), r, c, x.data(), y2.data());
        for (std::size_t i = 0; i < r; ++i) CHECK(std::abs(y1[i] - y2[i]) <= tol(c, static_cast<double>(c)));
        b->gemv_t(A.data(), r, c, z.data(), w1.data());
        scalar().gemv_t(A.data(), r, c, z.data(), w2.data());
        for (std::size_t i = 0; i < c; ++i) CHECK(std::abs(w1[i] - w2[i]) <= tol(r, static_cast<double>(r)));
      }
    }
  }

  TEST_CASE("scalar gemv agrees with a naive triple loop") {
    std::mt19937_64 g(14);
    const std::size_t r = 6, c = 11;
    auto A = randv(g, r * c), x = randv(g, c);
    std::vector<double> y(r);
    scalar().gemv(A.data(), r, c, x.data(), y.data());
    for (std::size_t i = 0; i < r; ++i) {
      long double s = 0;
      for (std::size_t j = 0; j < c; ++j) s += static_cast<long double>(A[i * c + j]) * x[j];
      CHECK(y[i] == doctest::Approx(static_cast<double>(s)).epsilon(1e-14));
    }
  }
}
