#pragma once

#include <cmath>

// Independent closed forms used as test oracles.
namespace oracle {

// Squared top singular vector overlaps (left times right) of a Gaussian rank-one spike,
// from the rectangular outlier formulas in theta^2 = lambda*, c = alpha.
inline double gauss_spectral_sq(double ls, double a) {
  if (ls * ls <= a) return 0.0;
  const double left = 1 - a * (1 + ls) / (ls * (ls + a));
  const double right = 1 - (a + ls) / (ls * (ls + 1));
  return left * right;
}

// Gaussian outlier location sqrt((1 + lambda*)(1 + alpha / lambda*)).
inline double gauss_outlier(double ls, double a) { return std::sqrt((1 + ls) * (1 + a / ls)); }

}  // namespace oracle
