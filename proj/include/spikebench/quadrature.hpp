#pragma once

#include <functional>

namespace spikebench {

// Adaptive Gauss-Kronrod on [a, b]; a finite, b may be +inf.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12);

}  // namespace spikebench
