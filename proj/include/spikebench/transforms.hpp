#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spikebench {

// Unit-variance rectangular Gaussian (Marchenko-Pastur singular law).
struct GaussianLaw {};
// Rank-one-sum noise with rectangular R-transform cz/(1-z).
struct RectPoissonLaw {
  double c = 1.0;
};
struct AtomicLaw {
  std::vector<double> atoms;
  std::vector<double> weights;
};
struct EmpiricalLaw {
  std::vector<double> samples;
};

struct EdgeData {
  double gamma_bar = 0.0;  // right end of the singular support
  double h_bar = 0.0;      // lim D(z) as z decreases to gamma_bar; may be +inf
};

// Symmetric singular-value law, stored by its restriction to t >= 0.
class SingularLaw {
 public:
  using Kind = std::variant<GaussianLaw, RectPoissonLaw, AtomicLaw, EmpiricalLaw>;

  static SingularLaw gaussian(double alpha);
  static SingularLaw rect_poisson(double alpha, double c = 1.0);
  static SingularLaw atomic(double alpha, std::vector<double> atoms, std::vector<double> weights);
  static SingularLaw empirical(double alpha, std::vector<double> samples);

  double aspect() const { return alpha_; }
  const Kind& kind() const { return kind_; }
  const EdgeData& edge() const { return edge_; }
  bool is_gaussian() const { return std::holds_alternative<GaussianLaw>(kind_); }
  bool is_rect_poisson() const { return std::holds_alternative<RectPoissonLaw>(kind_); }
  std::string describe() const;

  // Squared atoms / samples, used by the discrete-law sums.
  const std::vector<double>& squared_support() const { return sq_; }
  const std::vector<double>& discrete_weights() const { return w_; }

 private:
  SingularLaw(double alpha, Kind kind);
  double alpha_;
  Kind kind_;
  std::vector<double> sq_;
  std::vector<double> w_;
  EdgeData edge_;
};

struct CumulantSequence {
  double aspect = 1.0;
  std::vector<double> kappas;  // kappas[j-1] = kappa_{2j}
  int order() const { return static_cast<int>(kappas.size()); }
  double kappa(int j) const { return kappas.at(static_cast<std::size_t>(j - 1)); }
};

inline constexpr int kMaxCumulantOrder = 16;
inline constexpr double kInfiniteEdgeCutoff = 1e12;

// m_{2k} = int t^{2k} mu(dt)
double moment(const SingularLaw& law, int k);

// G(x) = int rho(dy) / (x - y), rho the law of t^2; x > gamma_bar^2.
double stieltjes(const SingularLaw& law, double x);
// int rho(dy) ln(x - y); x >= gamma_bar^2.
double log_potential(const SingularLaw& law, double x);

double d_transform(const SingularLaw& law, double z);
double d_inverse(const SingularLaw& law, double y);
double t_map(double alpha, double z);
double t_inverse(double alpha, double y);
double rect_r(const SingularLaw& law, double z);
double rect_r_derivative(const SingularLaw& law, double z);
// C and C' on (0, h_bar], extended to z = h_bar by continuity (D^{-1}(h_bar) = gamma_bar).
double rect_r_closed(const SingularLaw& law, double z);
double rect_r_derivative_closed(const SingularLaw& law, double z);
EdgeData edges(const SingularLaw& law);

// Order-by-order solution of C(z) = M(z / T(C(z))), extended precision.
CumulantSequence cumulants_from_moments(const std::vector<double>& moments, double alpha, int J);
// Inverse direction: moments m_2 .. m_{2J} of a cumulant sequence.
std::vector<double> moments_from_cumulants(const CumulantSequence& kappas, int J);
// Closed form when known, otherwise through the moments.
CumulantSequence law_cumulants(const SingularLaw& law, int J);

// High-temperature stationary point of the rectangular spherical integral.
std::pair<double, double> high_temp_stationary(const SingularLaw& law, double theta);
// Largest theta^2 for which the stationary point exists (equals h_bar).
double sticking_theta2(const SingularLaw& law);

}  // namespace spikebench
