#include "spikebench/matrix.hpp"

#include "spikebench/kernels.hpp"

namespace spikebench {

void matvec(const Mat& A, const Vec& x, Vec& y) {
  y.resize(A.rows());
  kernels::active().gemv(A.data(), A.rows(), A.cols(), x.data(), y.data());
}

void matvec_t(const Mat& A, const Vec& x, Vec& y) {
  y.resize(A.cols());
  kernels::active().gemv_t(A.data(), A.rows(), A.cols(), x.data(), y.data());
}

double dot(const Vec& a, const Vec& b) {
  return kernels::active().dot(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

}  // namespace spikebench
