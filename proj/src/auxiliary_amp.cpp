#include <cmath>

#include "se_chain.hpp"
#include "spikebench/error.hpp"
#include "spikebench/state_evolution.hpp"

namespace spikebench {

// AMP on the pure noise matrix. The signal enters through the state-evolution
// coefficients, while the Onsager memory uses the empirical tableau, so the
// pre-activations are asymptotically exactly the Gaussian inputs of the SE.
std::vector<AuxIterate> auxiliary_amp(const SpikedInstance& inst, const Mat& Z, const Vec& u1, const SEState& se,
                                      const CumulantSequence& kappas, const Denoisers& den, int t_max) {
  if (!den.separable()) throw DomainError("auxiliary AMP needs separable denoisers");
  if (se.t < t_max) throw DomainError("state evolution shorter than the requested horizon");
  if (Z.rows() != inst.n() || Z.cols() != inst.m() || u1.size() != inst.n())
    throw DomainError("auxiliary AMP dimensions disagree with the instance");
  const double alpha = inst.aspect;
  const detail::SampleBackend bu{inst.n()}, bv{inst.m()};
  detail::Chain<detail::SampleBackend> chain(bu, bv, den, alpha);
  chain.reset_u(u1, inst.u_star);
  chain.reset_v(inst.v_star);

  std::vector<AuxIterate> out;
  Vec zt, yt;
  std::vector<double> row;
  for (int t = 1; t <= t_max; ++t) {
    Covariances emp = assemble_covariances(chain.Delta(t), chain.Gamma(t), chain.Phi(t), chain.Psi(t), kappas, alpha);
    matvec_t(Z, chain.U(t), zt);
    for (int i = 1; i < t; ++i) zt -= emp.B(t - 1, i - 1) * chain.V(i);
    row.assign(static_cast<std::size_t>(t), 0.0);
    for (int i = 0; i < t - 1; ++i) row[i] = se.B(t - 1, i);
    auto pv = chain.push_v(zt, se.nu_vec[t - 1], se.beta_vec[t - 1], row.data());

    emp = assemble_covariances(chain.Delta(t), chain.Gamma(t), chain.Phi(t), chain.Psi(t), kappas, alpha);
    matvec(Z, chain.V(t), yt);
    for (int i = 1; i <= t; ++i) yt -= emp.A(t - 1, i - 1) * chain.U(i);
    for (int i = 0; i < t; ++i) row[i] = se.A(t - 1, i);
    auto pu = chain.push_u(yt, se.mu_vec[t - 1], se.alpha_vec[t - 1], row.data());

    AuxIterate it;
    it.t = t;
    it.u = chain.U(t);
    it.v = chain.V(t);
    it.g = std::move(pv.pre);
    it.f = std::move(pu.pre);
    it.overlap = overlap_of(it.u, it.v, inst);
    it.norm_u2 = it.u.squaredNorm() / static_cast<double>(inst.n());
    it.norm_v2 = it.v.squaredNorm() / static_cast<double>(inst.m());
    it.mse = mse_rank_one(it.u, it.v, inst);
    if (!std::isfinite(it.mse)) throw DivergenceError("auxiliary AMP produced a non-finite value", t);
    out.push_back(std::move(it));
  }
  return out;
}

}  // namespace spikebench
