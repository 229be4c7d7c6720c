#include "series.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <string>

#include "spikebench/error.hpp"

namespace spikebench::detail {
namespace {

using F = boost::multiprecision::cpp_bin_float_50;
using Poly = std::vector<F>;

Poly mul(const Poly& a, const Poly& b, int J) {
  Poly r(J + 1, F(0));
  for (int i = 0; i <= J; ++i) {
    if (a[i] == 0) continue;
    for (int k = 0; i + k <= J; ++k) r[i + k] += a[i] * b[k];
  }
  return r;
}

Poly inv(const Poly& a, int J) {
  Poly r(J + 1, F(0));
  r[0] = F(1) / a[0];
  for (int j = 1; j <= J; ++j) {
    F s = 0;
    for (int k = 1; k <= j; ++k) s += a[k] * r[j - k];
    r[j] = -s / a[0];
  }
  return r;
}

// s(z) = z / T(C(z))
Poly argument(const Poly& C, const F& alpha, int J) {
  Poly T(J + 1, F(0));
  Poly C2 = mul(C, C, J);
  for (int j = 0; j <= J; ++j) T[j] = (alpha + 1) * C[j] + alpha * C2[j];
  T[0] += 1;
  Poly it = inv(T, J);
  Poly s(J + 1, F(0));
  for (int j = 1; j <= J; ++j) s[j] = it[j - 1];
  return s;
}

void check_input(const std::vector<double>& v, int J, const char* what) {
  if (J < 1) throw DomainError("series order must be >= 1");
  if (static_cast<int>(v.size()) < J) throw DomainError(std::string("not enough ") + what);
  for (int j = 0; j < J; ++j)
    if (!std::isfinite(v[j])) throw DomainError(std::string("non-finite ") + what);
}

}  // namespace

std::vector<double> series_cumulants(const std::vector<double>& moments, double alpha, int J) {
  check_input(moments, J, "moments");
  const F a(alpha);
  Poly C(J + 1, F(0));
  std::vector<double> out(J);
  for (int j = 1; j <= J; ++j) {
    // kappa_{2j} only sees kappa_{2i}, i < j, through s(z).
    Poly s = argument(C, a, J);
    Poly sk = s;
    F coef = 0;
    F largest = 0;
    for (int k = 1; k <= j; ++k) {
      F term = F(moments[k - 1]) * sk[j];
      coef += term;
      largest = std::max(largest, boost::multiprecision::abs(term));
      sk = mul(sk, s, J);
    }
    if (largest > F(1e12))
      throw InstabilityError("cumulant series unstable at order " + std::to_string(j), j);
    C[j] = coef;
    out[j - 1] = static_cast<double>(coef);
  }
  return out;
}

std::vector<double> series_moments(const std::vector<double>& kappas, double alpha, int J) {
  check_input(kappas, J, "cumulants");
  Poly C(J + 1, F(0));
  for (int j = 1; j <= J; ++j) C[j] = F(kappas[j - 1]);
  Poly s = argument(C, F(alpha), J);
  std::vector<Poly> pw(J + 1);
  pw[1] = s;
  for (int k = 2; k <= J; ++k) pw[k] = mul(pw[k - 1], s, J);
  std::vector<F> m(J + 1, F(0));
  std::vector<double> out(J);
  for (int j = 1; j <= J; ++j) {
    F acc = C[j];
    for (int k = 1; k < j; ++k) acc -= m[k] * pw[k][j];
    m[j] = acc;
    out[j - 1] = static_cast<double>(acc);
    if (!std::isfinite(out[j - 1])) throw NumericalError("moment series overflow at order " + std::to_string(j));
  }
  return out;
}

}  // namespace spikebench::detail
