#pragma once

#include <vector>

#include "spikebench/denoisers.hpp"
#include "spikebench/ensembles.hpp"
#include "spikebench/error.hpp"
#include "spikebench/rng.hpp"

namespace spikebench {

struct AmpConfig {
  double lambda_assumed = 1.0;
  int t_max = 8;
  double init_corr = 0.2;
  DenoiserSpec denoiser;
  double early_stop_tol = 1e-6;  // <= 0 disables early stopping
};

struct AmpIterate {
  int t = 0;
  double overlap_u = 0.0;  // |<u, u*>| / (|u| |u*|)
  double overlap_v = 0.0;
  double overlap = 0.0;    // product of the two
  double mse = 0.0;
  double norm_u2 = 0.0;    // |u|^2 / n
  double norm_v2 = 0.0;    // |v|^2 / m
  double alpha_t = 0.0;
  double beta_t = 0.0;
};

struct AmpState {
  int t = 0;
  Vec u;       // u^t (before the sweep), u^{t+1} after it
  Vec v;       // v^t
  Vec g;       // g^t
  Vec f;       // f^t
  Vec v_prev;  // v^{t-1}
  double alpha_t = 0.0;
  double beta_t = 0.0;  // beta of the pending u iterate
  std::vector<AmpIterate> history;
};

struct AmpDivergenceError : DivergenceError {
  AmpDivergenceError(const std::string& what, int iteration_, std::vector<AmpIterate> h)
      : DivergenceError(what, iteration_), history(std::move(h)) {}
  std::vector<AmpIterate> history;
};

void validate(const AmpConfig& cfg);

// u^1 = eps u* + sqrt(1 - eps^2) w, w on the sphere and orthogonal to u*; |u^1|^2 = n.
Vec init_u1(const SpikedInstance& inst, double eps, Rng& rng);
AmpState amp_init(const SpikedInstance& inst, const AmpConfig& cfg, Rng& rng);
// One (g, v, f, u) sweep.
void amp_step(AmpState& state, const SpikedInstance& inst, const Denoisers& den);
AmpState run_amp(const SpikedInstance& inst, const AmpConfig& cfg, Rng& rng);

}  // namespace spikebench
