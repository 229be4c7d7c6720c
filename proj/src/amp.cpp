#include "spikebench/amp.hpp"

#include <cmath>
#include <string>

namespace spikebench {

void validate(const AmpConfig& cfg) {
  if (!(cfg.init_corr > 0 && cfg.init_corr <= 1)) throw DomainError("init_corr must lie in (0, 1]");
  if (cfg.t_max < 1) throw DomainError("t_max must be >= 1");
  if (!(cfg.lambda_assumed >= 0)) throw DomainError("lambda_assumed must be nonnegative");
}

Vec init_u1(const SpikedInstance& inst, double eps, Rng& rng) {
  if (!(eps > 0 && eps <= 1)) throw DomainError("init_corr must lie in (0, 1]");
  const double n = static_cast<double>(inst.n());
  if (eps == 1.0) return inst.u_star;
  Vec w = normal_vector(rng, inst.n());
  w -= (w.dot(inst.u_star) / inst.u_star.squaredNorm()) * inst.u_star;
  w *= std::sqrt(n) / w.norm();
  Vec u = eps * inst.u_star + std::sqrt(1 - eps * eps) * w;
  u *= std::sqrt(n) / u.norm();
  return u;
}

AmpState amp_init(const SpikedInstance& inst, const AmpConfig& cfg, Rng& rng) {
  validate(cfg);
  AmpState s;
  s.u = init_u1(inst, cfg.init_corr, rng);
  s.v_prev = Vec::Zero(inst.m());
  s.beta_t = 0.0;
  return s;
}

namespace {

bool finite(const Vec& x) { return x.allFinite(); }

}  // namespace

void amp_step(AmpState& s, const SpikedInstance& inst, const Denoisers& den) {
  const int t = s.t + 1;
  const double alpha = inst.aspect;
  matvec_t(inst.Y, s.u, s.g);
  if (t > 1) s.g -= alpha * s.beta_t * s.v_prev;
  Vec dv;
  den.apply_v(t, s.g, s.v, &dv);
  s.alpha_t = dv.mean();
  matvec(inst.Y, s.v, s.f);
  s.f -= s.alpha_t * s.u;
  if (!finite(s.g) || !finite(s.v) || !finite(s.f))
    throw AmpDivergenceError("AMP produced non-finite values at iteration " + std::to_string(t), t, s.history);

  AmpIterate it;
  it.t = t;
  const double nu = s.u.norm(), nv = s.v.norm();
  it.overlap_u = nu > 1e-12 ? std::abs(s.u.dot(inst.u_star)) / (nu * inst.u_star.norm()) : 0.0;
  it.overlap_v = nv > 1e-12 ? std::abs(s.v.dot(inst.v_star)) / (nv * inst.v_star.norm()) : 0.0;
  it.overlap = overlap_of(s.u, s.v, inst);
  it.mse = mse_rank_one(s.u, s.v, inst);
  it.norm_u2 = s.u.squaredNorm() / static_cast<double>(inst.n());
  it.norm_v2 = s.v.squaredNorm() / static_cast<double>(inst.m());
  it.alpha_t = s.alpha_t;
  it.beta_t = t > 1 ? s.beta_t : 0.0;
  s.history.push_back(it);

  Vec du, unext;
  den.apply_u(t + 1, s.f, unext, &du);
  if (!finite(unext))
    throw AmpDivergenceError("AMP produced non-finite values at iteration " + std::to_string(t), t, s.history);
  s.beta_t = du.mean();
  s.v_prev = s.v;
  s.u = std::move(unext);
  s.t = t;
}

AmpState run_amp(const SpikedInstance& inst, const AmpConfig& cfg, Rng& rng) {
  AmpState s = amp_init(inst, cfg, rng);
  const Denoisers den = Denoisers::make(cfg.denoiser, cfg.lambda_assumed, inst.aspect, cfg.init_corr, cfg.t_max);
  for (int t = 1; t <= cfg.t_max; ++t) {
    amp_step(s, inst, den);
    const auto& h = s.history;
    if (cfg.early_stop_tol > 0 && h.size() >= 2 &&
        std::abs(h.back().overlap - h[h.size() - 2].overlap) < cfg.early_stop_tol)
      break;
  }
  return s;
}

}  // namespace spikebench
