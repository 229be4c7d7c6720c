#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "spikebench/matrix.hpp"
#include "spikebench/rng.hpp"
#include "spikebench/transforms.hpp"

namespace spikebench {

struct GaussianNoise {};  // iid N(0, 1/m)
struct RectPoissonNoise {
  double c = 1.0;
};
struct FromLawNoise {
  SingularLaw law;
};
using NoiseSpec = std::variant<GaussianNoise, RectPoissonNoise, FromLawNoise>;

std::string noise_name(const NoiseSpec& spec);
// Limiting singular law of the noise at aspect alpha.
SingularLaw noise_law(const NoiseSpec& spec, double alpha);

struct SpikedInstance {
  Mat Y;
  Vec u_star;
  Vec v_star;
  double lambda_star = 0.0;
  double aspect = 1.0;
  NoiseSpec noise;
  std::uint64_t seed = 0;

  Eigen::Index n() const { return Y.rows(); }
  Eigen::Index m() const { return Y.cols(); }
  double spike_scale() const;  // sqrt(lambda* / (m n))
};

Vec sample_sphere(Eigen::Index dim, double radius, Rng& rng);
// Orthonormal columns, Haar distributed (rows >= cols).
Mat haar_orthonormal(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Mat sample_noise(const NoiseSpec& spec, Eigen::Index n, Eigen::Index m, Rng& rng);
// n iid singular values from the law (inverse CDF for analytic laws).
std::vector<double> sample_singular_values(const SingularLaw& law, Eigen::Index n, Rng& rng);
// Density of rho (law of t^2) at x, analytic laws only.
double squared_law_density(const SingularLaw& law, double x);

SpikedInstance build_instance(double lambda_star, const NoiseSpec& spec, Eigen::Index n, Eigen::Index m,
                              std::uint64_t seed);
// Z = Y - spike
Mat noise_of(const SpikedInstance& inst);

// (1/2mn) |u* v*^T - E|_F^2
double mse_of(const Mat& estimate, const SpikedInstance& inst);
// Same for E = u v^T without forming E.
double mse_rank_one(const Vec& u, const Vec& v, const SpikedInstance& inst);
double overlap_of(const Vec& u, const Vec& v, const SpikedInstance& inst);

}  // namespace spikebench
