#include <cmath>
#include <memory>

#include "se_chain.hpp"
#include "spikebench/error.hpp"
#include "spikebench/rng.hpp"
#include "spikebench/state_evolution.hpp"

namespace spikebench {

namespace {

using detail::Chain;
using detail::LinearBackend;
using detail::SampleBackend;

SmallMat pad(const SmallMat& M, Eigen::Index k) {
  SmallMat out = SmallMat::Zero(k, k);
  const Eigen::Index r = std::min(k, M.rows());
  out.topLeftCorner(r, r) = M.topLeftCorner(r, r);
  return out;
}

std::vector<double> row_of(const SmallMat& M, Eigen::Index i) {
  std::vector<double> r(static_cast<std::size_t>(M.cols()));
  for (Eigen::Index j = 0; j < M.cols(); ++j) r[j] = M(i, j);
  return r;
}

// Gaussian inputs for step s. Linear mode uses basis [1, U*, W, V*, y_1..y_s, z_1..z_s].
struct LinearSource {
  using Backend = LinearBackend;
  int s;
  LinearBackend be;
  explicit LinearSource(int s_) : s(s_) {
    const int dim = 4 + 2 * s;
    be.K = SmallMat::Zero(dim, dim);
    for (int i = 0; i < 4; ++i) be.K(i, i) = 1.0;
  }
  Vec unit(int i) const {
    Vec e = Vec::Zero(be.K.rows());
    e[i] = 1.0;
    return e;
  }
  Vec ustar() const { return unit(1); }
  Vec w() const { return unit(2); }
  Vec vstar() const { return unit(3); }
  std::vector<Vec> z(const SmallMat& Omega) {
    psd_cholesky(Omega, "Omega");
    be.K.block(4 + s, 4 + s, s, s) = Omega;
    std::vector<Vec> out;
    for (int r = 0; r < s; ++r) out.push_back(unit(4 + s + r));
    return out;
  }
  std::vector<Vec> y(const SmallMat& Sigma) {
    psd_cholesky(Sigma, "Sigma");
    be.K.block(4, 4, s, s) = Sigma;
    std::vector<Vec> out;
    for (int r = 0; r < s; ++r) out.push_back(unit(4 + r));
    return out;
  }
  const LinearBackend& backend() const { return be; }
};

// Monte Carlo inputs. Every Gaussian column has its own derived stream, so runs
// with different horizons share their leading columns.
struct SampleSource {
  using Backend = SampleBackend;
  int s;
  MCConfig mc;
  SampleBackend be;
  explicit SampleSource(int s_, const MCConfig& mc_) : s(s_), mc(mc_) { be.len = mc.samples; }
  Vec column(std::uint64_t tag) const {
    Rng rng(derive_seed(mc.seed, tag));
    return normal_vector(rng, mc.samples);
  }
  Vec ustar() const { return column(1); }
  Vec w() const { return column(2); }
  Vec vstar() const { return column(3); }
  std::vector<Vec> mix(const SmallMat& S, const char* what, std::uint64_t base) const {
    const SmallMat L = psd_cholesky(S, what);
    std::vector<Vec> xi;
    for (int k = 0; k < s; ++k) xi.push_back(column(base + static_cast<std::uint64_t>(k)));
    std::vector<Vec> out;
    for (int r = 0; r < s; ++r) {
      Vec acc = Vec::Zero(mc.samples);
      for (int k = 0; k <= r; ++k)
        if (L(r, k) != 0.0) acc += L(r, k) * xi[k];
      out.push_back(std::move(acc));
    }
    return out;
  }
  std::vector<Vec> z(const SmallMat& Omega) { return mix(Omega, "Omega", 1000); }
  std::vector<Vec> y(const SmallMat& Sigma) { return mix(Sigma, "Sigma", 2000); }
  const SampleBackend& backend() const { return be; }
};

template <class Source>
SEState step_with(const SEState& st, const CumulantSequence& kappas, const Denoisers& den, Source& src) {
  const int s = st.t + 1;
  const double alpha = st.aspect;
  const SmallMat Delta = pad(st.Delta, s);
  const SmallMat Phi = pad(st.Phi, s);

  // v half: V_1..V_s from z ~ N(0, Omega_s)
  const Covariances c1 = assemble_covariances(Delta, pad(st.Gamma, s), Phi, pad(st.Psi, s), kappas, alpha);
  const std::vector<Vec> zs = src.z(c1.Omega);
  const auto& be = src.backend();
  Chain<typename Source::Backend> chain(be, be, den, alpha);
  const Vec ustar = src.ustar();
  const Vec vstar = src.vstar();
  chain.reset_v(vstar);
  double alpha_new = 0.0;
  for (int r = 1; r <= s; ++r) {
    const std::vector<double> Brow = row_of(c1.B, r - 1);
    alpha_new = chain.push_v(zs[r - 1], st.nu_vec[r - 1], st.beta_vec[r - 1], Brow.data()).mean_deriv;
  }
  const SmallMat Gamma = chain.Gamma(s);
  const SmallMat Psi = chain.Psi(s);
  const double evv = be.E(vstar, chain.V(s));
  const double mu_new = st.theta / alpha * evv;

  // u half: U_2..U_{s+1} from y ~ N(0, Sigma_s)
  const Covariances c2 = assemble_covariances(Delta, Gamma, Phi, Psi, kappas, alpha);
  const std::vector<Vec> ys = src.y(c2.Sigma);
  std::vector<double> mu_vec = st.mu_vec;
  mu_vec.push_back(mu_new);
  std::vector<double> alpha_vec = st.alpha_vec;
  alpha_vec.push_back(alpha_new);
  chain.reset_u(st.eps * ustar + std::sqrt(1.0 - st.eps * st.eps) * src.w(), ustar);
  double beta_new = 0.0;
  for (int r = 1; r <= s; ++r) {
    const std::vector<double> Arow = row_of(c2.A, r - 1);
    beta_new = chain.push_u(ys[r - 1], mu_vec[r - 1], alpha_vec[r - 1], Arow.data()).mean_deriv;
  }

  SEState out;
  out.t = s;
  out.aspect = alpha;
  out.theta = st.theta;
  out.eps = st.eps;
  out.Delta = chain.Delta(s + 1);
  out.Phi = chain.Phi(s + 1);
  out.Gamma = Gamma;
  out.Psi = Psi;
  out.Omega = c1.Omega;
  out.B = c1.B;
  out.Sigma = c2.Sigma;
  out.A = c2.A;
  out.mu_vec = std::move(mu_vec);
  out.alpha_vec = std::move(alpha_vec);
  out.beta_vec = st.beta_vec;
  out.beta_vec.push_back(beta_new);
  out.nu_vec = st.nu_vec;
  out.nu_vec.push_back(st.theta * be.E(ustar, chain.U(s + 1)));
  out.alpha_bar = alpha_new;
  out.beta_bar = beta_new;
  out.metrics = st.metrics;

  SEMetrics m;
  m.t = s;
  m.e_ustar_u = be.E(ustar, chain.U(s));
  m.e_u2 = be.E(chain.U(s), chain.U(s));
  m.e_vstar_v = evv;
  m.e_v2 = be.E(chain.V(s), chain.V(s));
  const double nn = m.e_u2 * m.e_v2;
  const double ref = be.E(ustar, ustar) * be.E(vstar, vstar);
  m.overlap = nn > 0.0 ? std::abs(m.e_ustar_u * m.e_vstar_v) / std::sqrt(nn * ref) : 0.0;
  m.mse = 0.5 * (1.0 - 2.0 * m.e_ustar_u * m.e_vstar_v + nn);
  if (!std::isfinite(m.mse)) throw DivergenceError("state evolution produced a non-finite value", s);
  out.metrics.push_back(m);
  return out;
}

}  // namespace

SEState se_init(double lambda_star, double alpha, double eps) {
  if (!(lambda_star >= 0.0) || !(alpha > 0.0 && alpha <= 1.0) || !(eps > 0.0 && eps <= 1.0))
    throw DomainError("se_init needs lambda* >= 0, alpha in (0, 1], eps in (0, 1]");
  SEState st;
  st.t = 0;
  st.aspect = alpha;
  st.theta = std::sqrt(lambda_star * alpha);
  st.eps = eps;
  st.Delta = SmallMat::Ones(1, 1);
  st.Phi = SmallMat::Zero(1, 1);
  st.Gamma = SmallMat::Zero(0, 0);
  st.Psi = SmallMat::Zero(0, 0);
  st.nu_vec = {st.theta * eps};
  st.beta_vec = {0.0};
  return st;
}

SEState se_step(const SEState& state, const CumulantSequence& kappas, const Denoisers& den, const MCConfig& mc) {
  if (!den.separable()) throw DomainError("state evolution needs separable denoisers");
  if (den.linear()) {
    LinearSource src(state.t + 1);
    return step_with(state, kappas, den, src);
  }
  if (mc.samples < kMinMcSamples) throw DomainError("Monte Carlo state evolution needs at least 10^4 samples");
  SampleSource src(state.t + 1, mc);
  return step_with(state, kappas, den, src);
}

SEState run_se(double lambda_star, double alpha, double eps, const CumulantSequence& kappas, const Denoisers& den,
               int t_max, const MCConfig& mc) {
  if (t_max < 1) throw DomainError("t_max must be positive");
  SEState st = se_init(lambda_star, alpha, eps);
  for (int k = 0; k < t_max; ++k) st = se_step(st, kappas, den, mc);
  return st;
}

std::vector<SEMetrics> se_predict_metrics(const SEState& state) {
  if (state.metrics.empty()) throw DomainError("no completed state evolution iteration");
  return state.metrics;
}

}  // namespace spikebench
