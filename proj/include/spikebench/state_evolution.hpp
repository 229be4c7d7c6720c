#pragma once

#include <cstdint>
#include <vector>

#include "spikebench/amp.hpp"
#include "spikebench/denoisers.hpp"
#include "spikebench/ensembles.hpp"
#include "spikebench/matrix.hpp"
#include "spikebench/transforms.hpp"

namespace spikebench {

inline constexpr int kMinMcSamples = 10000;

struct MCConfig {
  int samples = 200000;
  std::uint64_t seed = 0x5eedULL;
};

struct SEMetrics {
  int t = 0;
  double e_ustar_u = 0.0;  // E[U* U_t]
  double e_u2 = 0.0;       // E[U_t^2]
  double e_vstar_v = 0.0;  // E[V* V_t]
  double e_v2 = 0.0;       // E[V_t^2]
  double overlap = 0.0;
  double mse = 0.0;
};

// Tableau after t completed iterations: U_1..U_{t+1} and V_1..V_t are defined.
// Phi(i, j) = E[d U_i / d Y_j] (nonzero for j < i); Psi(i, j) = E[d V_i / d Z_j] (j <= i).
struct SEState {
  int t = 0;
  double aspect = 1.0;
  double theta = 0.0;  // sqrt(lambda* alpha)
  double eps = 0.0;
  SmallMat Delta, Gamma, Phi, Psi;  // (t+1)^2, t^2, (t+1)^2, t^2
  SmallMat Omega, Sigma, A, B;      // t^2 each, from the latest assembly
  std::vector<double> mu_vec;       // length t
  std::vector<double> nu_vec;       // length t+1
  std::vector<double> alpha_vec;    // alpha_bar_s, length t
  std::vector<double> beta_vec;     // beta_bar_s, length t+1, beta_bar_1 = 0
  double alpha_bar = 0.0;
  double beta_bar = 0.0;
  std::vector<SEMetrics> metrics;
};

struct Covariances {
  SmallMat Omega, Sigma, A, B;
};

SEState se_init(double lambda_star, double alpha, double eps);

// Polynomial sums over the rectangular free cumulants. All inputs t x t.
Covariances assemble_covariances(const SmallMat& Delta, const SmallMat& Gamma, const SmallMat& Phi,
                                 const SmallMat& Psi, const CumulantSequence& kappas, double alpha);

// Lower-triangular L with L L^T = S for positive semidefinite S (zero pivots allowed).
SmallMat psd_cholesky(const SmallMat& S, const char* what);

// One iteration. Linear denoisers use exact Gaussian algebra; others use Monte Carlo.
SEState se_step(const SEState& state, const CumulantSequence& kappas, const Denoisers& den, const MCConfig& mc);
SEState run_se(double lambda_star, double alpha, double eps, const CumulantSequence& kappas, const Denoisers& den,
               int t_max, const MCConfig& mc = {});
std::vector<SEMetrics> se_predict_metrics(const SEState& state);

// Test-only oracle driven by the pure noise Z.
struct AuxIterate {
  int t = 0;
  Vec u;  // u~^t
  Vec v;  // v~^t
  Vec g;  // argument of v_t
  Vec f;  // argument of u_{t+1}
  double overlap = 0.0;
  double norm_u2 = 0.0;
  double norm_v2 = 0.0;
  double mse = 0.0;
};

std::vector<AuxIterate> auxiliary_amp(const SpikedInstance& inst, const Mat& Z, const Vec& u1, const SEState& se,
                                      const CumulantSequence& kappas, const Denoisers& den, int t_max);

}  // namespace spikebench
