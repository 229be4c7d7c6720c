#pragma once

#include <Eigen/Dense>

namespace spikebench {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
// Small dense matrices of the state evolution.
using SmallMat = Eigen::MatrixXd;

// y = A x and y = A^T x through the active kernel table.
void matvec(const Mat& A, const Vec& x, Vec& y);
void matvec_t(const Mat& A, const Vec& x, Vec& y);
double dot(const Vec& a, const Vec& b);

}  // namespace spikebench
