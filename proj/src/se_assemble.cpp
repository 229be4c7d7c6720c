#include <cmath>
#include <string>

#include "spikebench/error.hpp"
#include "spikebench/state_evolution.hpp"

namespace spikebench {

Covariances assemble_covariances(const SmallMat& Delta, const SmallMat& Gamma, const SmallMat& Phi,
                                 const SmallMat& Psi, const CumulantSequence& kappas, double alpha) {
  const Eigen::Index t = Delta.rows();
  if (Gamma.rows() != t || Phi.rows() != t || Psi.rows() != t) throw DomainError("tableau blocks differ in size");
  if (kappas.order() < 2 * t)
    throw DomainError("need " + std::to_string(2 * t) + " cumulants for iteration " + std::to_string(t) + ", have " +
                      std::to_string(kappas.order()));
  const SmallMat P = Phi * Psi;  // strictly lower
  const SmallMat Q = Psi * Phi;  // strictly lower
  const int top = static_cast<int>(2 * t);
  std::vector<SmallMat> Pp(top + 1), Qp(top + 1);
  Pp[0] = Qp[0] = SmallMat::Identity(t, t);
  for (int i = 1; i <= top; ++i) {
    Pp[i] = Pp[i - 1] * P;
    Qp[i] = Qp[i - 1] * Q;
  }
  const SmallMat PGP = Phi * Gamma * Phi.transpose();
  const SmallMat QDQ = Psi * Delta * Psi.transpose();

  Covariances c;
  c.Omega = SmallMat::Zero(t, t);
  for (int j = 0; j <= top - 2; ++j) {
    SmallMat Th = SmallMat::Zero(t, t);
    for (int i = 0; i <= j; ++i) Th += Pp[i] * Delta * Pp[j - i].transpose();
    for (int i = 0; i <= j - 1; ++i) Th += Pp[i] * PGP * Pp[j - 1 - i].transpose();
    c.Omega += kappas.kappa(j + 1) * Th;
  }
  c.Omega *= alpha;
  c.Sigma = SmallMat::Zero(t, t);
  for (int j = 0; j <= top - 1; ++j) {
    SmallMat Xi = SmallMat::Zero(t, t);
    for (int i = 0; i <= j; ++i) Xi += Qp[i] * Gamma * Qp[j - i].transpose();
    for (int i = 0; i <= j - 1; ++i) Xi += Qp[i] * QDQ * Qp[j - 1 - i].transpose();
    c.Sigma += kappas.kappa(j + 1) * Xi;
  }
  c.B = SmallMat::Zero(t, t);
  for (int j = 0; j <= t - 1; ++j) c.B += kappas.kappa(j + 1) * Phi * Qp[j];
  c.B *= alpha;
  c.A = SmallMat::Zero(t, t);
  for (int j = 0; j <= t; ++j) c.A += kappas.kappa(j + 1) * Psi * Pp[j];
  c.Omega = 0.5 * (c.Omega + c.Omega.transpose()).eval();
  c.Sigma = 0.5 * (c.Sigma + c.Sigma.transpose()).eval();
  return c;
}

SmallMat psd_cholesky(const SmallMat& S, const char* what) {
  const Eigen::Index t = S.rows();
  SmallMat L = SmallMat::Zero(t, t);
  const double scale = std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
  if (t > 0) {
    const double lo = Eigen::SelfAdjointEigenSolver<SmallMat>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (lo < -1e-8 * scale)
      throw NumericalError(std::string(what) + " is not positive semidefinite (eigenvalue " + std::to_string(lo) + ")");
  }
  for (Eigen::Index j = 0; j < t; ++j) {
    double d = S(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d <= 1e-14 * scale) continue;  // degenerate direction
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < t; ++i) {
      double s = S(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return L;
}

}  // namespace spikebench
