#pragma once

#include <cstdint>
#include <utility>

#include "spikebench/ensembles.hpp"
#include "spikebench/transforms.hpp"

namespace spikebench {

struct SpectralEstimate {
  Vec u1;  // |u1|^2 = n
  Vec v1;  // |v1|^2 = m
  double sigma1 = 0.0;
  double j_scale = 0.0;
};

struct SingularTriplet {
  double sigma = 0.0;
  Vec u;  // |u|^2 = n, u(0) >= 0
  Vec v;  // |v|^2 = m
  int matvecs = 0;
};

// Top singular triplet by Lanczos bidiagonalization with full reorthogonalization.
// The start vector is drawn from seed.
SingularTriplet top_singular_triplet(const Mat& Y, std::uint64_t seed = 0);

// Scale of the optimal rank-one spectral estimate; 0 below the BBP transition.
double j_scaling(const SingularLaw& law, double lambda_star);

SpectralEstimate optspec(const SpikedInstance& inst);
SpectralEstimate gauspec(const SpikedInstance& inst, double lambda);
// MSE of J u1 v1^T.
double spectral_mse(const SpectralEstimate& est, const SpikedInstance& inst);

struct SpectralTheory {
  double mse_os = 0.5;
  double mse_gs = 0.5;
  double j_os = 0.0;
  double j_gs = 0.0;
};

SpectralTheory spectral_theory_mse(const SingularLaw& law, double lambda, double lambda_star);

}  // namespace spikebench
