#pragma once

#include <vector>

namespace spikebench::detail {

// Truncated power series kernels on 50-digit floats. Index j = coefficient of z^j.
std::vector<double> series_cumulants(const std::vector<double>& moments, double alpha, int J);
std::vector<double> series_moments(const std::vector<double>& kappas, double alpha, int J);

}  // namespace spikebench::detail
