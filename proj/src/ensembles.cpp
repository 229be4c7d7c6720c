#include "spikebench/ensembles.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "spikebench/error.hpp"

namespace spikebench {

std::string noise_name(const NoiseSpec& spec) {
  if (std::holds_alternative<GaussianNoise>(spec)) return "gaussian";
  if (auto* p = std::get_if<RectPoissonNoise>(&spec)) {
    std::ostringstream os;
    os << "rect_poisson(c=" << p->c << ")";
    return os.str();
  }
  return "from_law[" + std::get<FromLawNoise>(spec).law.describe() + "]";
}

SingularLaw noise_law(const NoiseSpec& spec, double alpha) {
  if (std::holds_alternative<GaussianNoise>(spec)) return SingularLaw::gaussian(alpha);
  if (auto* p = std::get_if<RectPoissonNoise>(&spec)) return SingularLaw::rect_poisson(alpha, p->c);
  return std::get<FromLawNoise>(spec).law;
}

double SpikedInstance::spike_scale() const {
  return std::sqrt(lambda_star / (static_cast<double>(n()) * static_cast<double>(m())));
}

Vec sample_sphere(Eigen::Index dim, double radius, Rng& rng) {
  if (dim < 1 || !(radius > 0)) throw DomainError("sample_sphere needs dim >= 1 and radius > 0");
  Vec v = normal_vector(rng, dim);
  double nrm = v.norm();
  while (nrm == 0.0) {
    v = normal_vector(rng, dim);
    nrm = v.norm();
  }
  v *= radius / nrm;
  return v;
}

Mat haar_orthonormal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd G(rows, cols);
  fill_normal(rng, G.data(), static_cast<std::size_t>(G.size()));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const auto& R = qr.matrixQR();
  for (Eigen::Index j = 0; j < cols; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

namespace {

// rows are unit vectors of length dim
Mat unit_rows(Eigen::Index count, Eigen::Index dim, Rng& rng) {
  Mat A(count, dim);
  fill_normal(rng, A.data(), static_cast<std::size_t>(A.size()));
  for (Eigen::Index k = 0; k < count; ++k) {
    double nrm = A.row(k).norm();
    while (nrm == 0.0) {
      fill_normal(rng, A.row(k).data(), static_cast<std::size_t>(dim));
      nrm = A.row(k).norm();
    }
    A.row(k) /= nrm;
  }
  return A;
}

// C = A^T B with A (k x n), B (k x m), all row-major.
Mat at_b(const Mat& A, const Mat& B) {
  Mat C(A.cols(), B.cols());
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(A.cols()), static_cast<int>(B.cols()),
              static_cast<int>(A.rows()), 1.0, A.data(), static_cast<int>(A.cols()), B.data(),
              static_cast<int>(B.cols()), 0.0, C.data(), static_cast<int>(C.cols()));
  return C;
}

std::complex<double> poisson_c(double c, std::complex<double> y) { return c * y / (1.0 - y); }

}  // namespace

double squared_law_density(const SingularLaw& law, double x) {
  const double a = law.aspect();
  if (law.is_gaussian()) {
    const double sa = std::sqrt(a);
    const double lo = (1 - sa) * (1 - sa), hi = (1 + sa) * (1 + sa);
    if (x <= lo || x >= hi) return 0.0;
    return std::sqrt((hi - x) * (x - lo)) / (2 * M_PI * a * x);
  }
  if (auto* p = std::get_if<RectPoissonLaw>(&law.kind())) {
    if (x <= 0) return 0.0;
    // D(z) = y solves T(C(y)) = x y; clearing (1 - y)^2 leaves a cubic in y.
    const double c = p->c, a1 = a * c - 1, b1 = c - 1;
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    const double c3 = x, c2 = -(2 * x + a1 * b1), c1 = x - a1 - b1, c0 = -1;
    comp(0, 0) = -c2 / c3;
    comp(0, 1) = -c1 / c3;
    comp(0, 2) = -c0 / c3;
    comp(1, 0) = 1;
    comp(2, 1) = 1;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
    double best = 0.0;
    for (int i = 0; i < 3; ++i) {
      std::complex<double> y = es.eigenvalues()(i);
      if (std::abs(y.imag()) < 1e-12) continue;
      best = std::max(best, std::abs(poisson_c(c, y).imag()) / (M_PI * x));
    }
    return best;
  }
  throw DomainError("density is only available for analytic laws");
}

std::vector<double> sample_singular_values(const SingularLaw& law, Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(n));
  if (auto* at = std::get_if<AtomicLaw>(&law.kind())) {
    std::discrete_distribution<std::size_t> pick(at->weights.begin(), at->weights.end());
    for (auto& s : out) s = at->atoms[pick(rng)];
    return out;
  }
  if (auto* em = std::get_if<EmpiricalLaw>(&law.kind())) {
    std::uniform_int_distribution<std::size_t> pick(0, em->samples.size() - 1);
    for (auto& s : out) s = em->samples[pick(rng)];
    return out;
  }
  // Tabulated CDF of rho on a cosine grid over [0, gamma_bar^2]; leftover mass sits at 0.
  const int K = 8192;
  const double top = law.edge().gamma_bar * law.edge().gamma_bar;
  std::vector<double> xs(K + 1), cdf(K + 1, 0.0);
  for (int k = 0; k <= K; ++k) xs[k] = top * 0.5 * (1 - std::cos(M_PI * k / K));
  std::vector<double> dens(K + 1);
  for (int k = 0; k <= K; ++k) dens[k] = squared_law_density(law, xs[k]);
  for (int k = 1; k <= K; ++k) cdf[k] = cdf[k - 1] + 0.5 * (dens[k] + dens[k - 1]) * (xs[k] - xs[k - 1]);
  const double mass = cdf[K];
  if (mass > 1 + 1e-3) throw NumericalError("tabulated density integrates above one");
  const double atom0 = std::max(0.0, 1.0 - mass);
  for (auto& s : out) {
    double u = unif(rng);
    if (u < atom0) {
      s = 0.0;
      continue;
    }
    u = (u - atom0);
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, K);
    const double span = cdf[k] - cdf[k - 1];
    const double f = span > 0 ? (u - cdf[k - 1]) / span : 0.5;
    s = std::sqrt(std::max(0.0, xs[k - 1] + f * (xs[k] - xs[k - 1])));
  }
  return out;
}

Mat sample_noise(const NoiseSpec& spec, Eigen::Index n, Eigen::Index m, Rng& rng) {
  if (n < 1 || n > m) throw DomainError("sample_noise needs 1 <= n <= m");
  if (std::holds_alternative<GaussianNoise>(spec)) {
    Mat Z(n, m);
    fill_normal(rng, Z.data(), static_cast<std::size_t>(Z.size()));
    Z *= 1.0 / std::sqrt(static_cast<double>(m));
    return Z;
  }
  if (auto* p = std::get_if<RectPoissonNoise>(&spec)) {
    if (!(p->c > 0)) throw DomainError("poisson rate must be positive");
    const auto terms = std::max<Eigen::Index>(1, std::llround(p->c * static_cast<double>(n)));
    Mat U = unit_rows(terms, n, rng);
    Mat V = unit_rows(terms, m, rng);
    return at_b(U, V);
  }
  const auto& law = std::get<FromLawNoise>(spec).law;
  std::vector<double> sig = sample_singular_values(law, n, rng);
  Mat U = haar_orthonormal(n, n, rng);
  Mat V = haar_orthonormal(m, n, rng);
  for (Eigen::Index j = 0; j < n; ++j) U.col(j) *= sig[static_cast<std::size_t>(j)];
  // (U diag(sig)) V^T = (U^T)^T V^T
  Mat Ut = U.transpose();
  Mat Vt = V.transpose();
  return at_b(Ut, Vt);
}

SpikedInstance build_instance(double lambda_star, const NoiseSpec& spec, Eigen::Index n, Eigen::Index m,
                              std::uint64_t seed) {
  if (!(lambda_star >= 0)) throw DomainError("lambda_star must be nonnegative");
  Rng rng(seed);
  SpikedInstance inst;
  inst.lambda_star = lambda_star;
  inst.aspect = static_cast<double>(n) / static_cast<double>(m);
  inst.noise = spec;
  inst.seed = seed;
  inst.u_star = sample_sphere(n, std::sqrt(static_cast<double>(n)), rng);
  inst.v_star = sample_sphere(m, std::sqrt(static_cast<double>(m)), rng);
  inst.Y = sample_noise(spec, n, m, rng);
  if (lambda_star > 0) inst.Y.noalias() += inst.spike_scale() * inst.u_star * inst.v_star.transpose();
  return inst;
}

Mat noise_of(const SpikedInstance& inst) {
  Mat Z = inst.Y;
  if (inst.lambda_star > 0) Z.noalias() -= inst.spike_scale() * inst.u_star * inst.v_star.transpose();
  return Z;
}

double mse_of(const Mat& estimate, const SpikedInstance& inst) {
  if (estimate.rows() != inst.n() || estimate.cols() != inst.m()) throw DomainError("estimate shape mismatch");
  const double nm = static_cast<double>(inst.n()) * static_cast<double>(inst.m());
  Mat diff = inst.u_star * inst.v_star.transpose() - estimate;
  return diff.squaredNorm() / (2 * nm);
}

double mse_rank_one(const Vec& u, const Vec& v, const SpikedInstance& inst) {
  if (u.size() != inst.n() || v.size() != inst.m()) throw DomainError("estimate shape mismatch");
  const double nm = static_cast<double>(inst.n()) * static_cast<double>(inst.m());
  const double cross = u.dot(inst.u_star) * v.dot(inst.v_star);
  return (nm - 2 * cross + u.squaredNorm() * v.squaredNorm()) / (2 * nm);
}

double overlap_of(const Vec& u, const Vec& v, const SpikedInstance& inst) {
  const double nu = u.norm(), nv = v.norm();
  if (nu < 1e-12 || nv < 1e-12) return 0.0;
  return std::abs(u.dot(inst.u_star)) * std::abs(v.dot(inst.v_star)) /
         (nu * inst.u_star.norm() * nv * inst.v_star.norm());
}

}  // namespace spikebench
