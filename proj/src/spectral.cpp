#include "spikebench/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spikebench/error.hpp"
#include "spikebench/rng.hpp"

namespace spikebench {

namespace {

constexpr int kMatvecCap = 10000;
constexpr int kKrylovMax = 64;
constexpr double kRitzTol = 1e-10;
constexpr double kResidualTol = 1e-8;

void reorthogonalize(const Eigen::MatrixXd& Basis, Eigen::Index cols, Vec& x) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) x -= Basis.leftCols(cols) * (Basis.leftCols(cols).transpose() * x);
}

}  // namespace

SingularTriplet top_singular_triplet(const Mat& Y, std::uint64_t seed) {
  const Eigen::Index n = Y.rows(), m = Y.cols();
  if (n == 0 || m == 0) throw DomainError("empty matrix");
  const double fro = Y.norm();
  if (!(fro > 0)) throw DomainError("top_singular_triplet needs a nonzero matrix");
  if (!std::isfinite(fro)) throw DomainError("matrix has non-finite entries");

  const Eigen::Index kmax = std::min<Eigen::Index>(kKrylovMax, std::min(n, m));
  Rng rng(derive_seed(seed, 0x5bd1e995ULL));
  Vec start = normal_vector(rng, m);
  start.normalize();

  SingularTriplet out;
  Eigen::MatrixXd U(n, kmax), V(m, kmax + 1);
  Vec p(n), r(m), col(m);
  double sigma = 0.0, resid = 0.0;
  Vec left, right;
  // square B_k while the recurrence continues; on an invariant left space the k x (k+1) block
  // with beta_k in the last column is the exact restriction of Y
  auto ritz = [&](const std::vector<double>& al, const std::vector<double>& be, Eigen::Index k, double b,
                  bool rect) {
    const Eigen::Index c = rect ? k + 1 : k;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k, c);
    for (Eigen::Index i = 0; i < k; ++i) {
      B(i, i) = al[i];
      if (i + 1 < c) B(i, i + 1) = be[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    sigma = svd.singularValues()(0);
    resid = rect ? 0.0 : b * std::abs(svd.matrixU()(k - 1, 0));
    left = U.leftCols(k) * svd.matrixU().col(0);
    right = V.leftCols(c) * svd.matrixV().col(0);
  };
  while (true) {
    V.col(0) = start;
    std::vector<double> al, be;
    Eigen::Index k = 0;
    bool done = false, invariant = false;
    for (Eigen::Index j = 0; j < kmax; ++j) {
      col = V.col(j);
      matvec(Y, col, p);
      ++out.matvecs;
      if (j > 0) p -= be[j - 1] * U.col(j - 1);
      reorthogonalize(U, j, p);
      const double a = p.norm();
      if (!(a > 1e-14 * fro)) {  // invariant subspace
        invariant = true;
        break;
      }
      U.col(j) = p / a;
      col = U.col(j);
      matvec_t(Y, col, r);
      ++out.matvecs;
      r -= a * V.col(j);
      reorthogonalize(V, j + 1, r);
      const double b = r.norm();
      al.push_back(a);
      be.push_back(b);
      k = j + 1;
      const bool exhausted = b <= 1e-14 * fro;
      V.col(j + 1) = exhausted ? Vec::Zero(m) : Vec(r / b);
      if (k % 4 == 0 || k == kmax || exhausted || out.matvecs >= kMatvecCap) {
        ritz(al, be, k, b, false);
        if (resid <= kRitzTol * sigma || exhausted) {
          done = true;
          break;
        }
        if (out.matvecs >= kMatvecCap) break;
      }
    }
    if (invariant && k > 0) {
      ritz(al, be, k, 0.0, true);
      done = true;
    }
    if (k == 0) throw NumericalError("Lanczos bidiagonalization broke down at the first step");
    if (done || out.matvecs >= kMatvecCap) break;
    start = right.normalized();
  }

  left.normalize();
  right.normalize();
  Vec yu(n), yv(m);
  matvec(Y, right, yu);
  matvec_t(Y, left, yv);
  const double res = std::max((yu - sigma * left).norm(), (yv - sigma * right).norm());
  if (!(res <= kResidualTol * sigma))
    throw ConvergenceError("top singular triplet did not converge within " + std::to_string(kMatvecCap) + " products",
                           res);
  if (left(0) < 0) {
    left = -left;
    right = -right;
  }
  out.sigma = sigma;
  out.u = left * std::sqrt(static_cast<double>(n));
  out.v = right * std::sqrt(static_cast<double>(m));
  return out;
}

double j_scaling(const SingularLaw& law, double lambda_star) {
  if (!(lambda_star > 0)) throw DomainError("j_scaling needs lambda* > 0");
  const double a = law.aspect();
  const double y0 = 1.0 / lambda_star;
  if (y0 > law.edge().h_bar) return 0.0;
  const double C = rect_r_closed(law, y0);
  const double Cp = rect_r_derivative_closed(law, y0);
  const double Tc = t_map(a, C);
  return std::abs(Tc - y0 * Cp * (2 * a * C + a + 1)) / std::sqrt(Tc);
}

namespace {

SpectralEstimate estimate_with(const SpikedInstance& inst, double J) {
  const SingularTriplet tr = top_singular_triplet(inst.Y, inst.seed);
  return SpectralEstimate{tr.u, tr.v, tr.sigma, J};
}

}  // namespace

SpectralEstimate optspec(const SpikedInstance& inst) {
  return estimate_with(inst, j_scaling(noise_law(inst.noise, inst.aspect), inst.lambda_star));
}

SpectralEstimate gauspec(const SpikedInstance& inst, double lambda) {
  return estimate_with(inst, j_scaling(SingularLaw::gaussian(inst.aspect), lambda));
}

double spectral_mse(const SpectralEstimate& est, const SpikedInstance& inst) {
  return mse_rank_one(est.j_scale * est.u1, est.v1, inst);
}

SpectralTheory spectral_theory_mse(const SingularLaw& law, double lambda, double lambda_star) {
  if (!(lambda > 0) || !(lambda_star > 0)) throw DomainError("spectral theory needs positive SNRs");
  SpectralTheory s;
  s.j_os = j_scaling(law, lambda_star);
  s.j_gs = j_scaling(SingularLaw::gaussian(law.aspect()), lambda);
  s.mse_os = 0.5 * (1.0 - s.j_os * s.j_os);
  s.mse_gs = 0.5 * (1.0 + s.j_gs * s.j_gs - 2.0 * s.j_gs * s.j_os);
  return s;
}

}  // namespace spikebench
