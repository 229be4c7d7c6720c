#include "spikebench/transforms.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "series.hpp"
#include "spikebench/error.hpp"
#include "spikebench/kernels.hpp"
#include "spikebench/quadrature.hpp"

namespace spikebench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Root of a monotone f on [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bracket_root(F f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NumericalError("root not bracketed");
  std::uintmax_t iters = 300;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double gauss_excess(double alpha, double s) {
  // G(s) - 1/s for the Marchenko-Pastur law, free of cancellation.
  const double sa = std::sqrt(alpha);
  const double a = (1 - sa) * (1 - sa), b = (1 + sa) * (1 + sa);
  const double R = std::sqrt(std::max(0.0, (s - a) * (s - b)));
  return 4.0 / ((s + alpha - 1 + R) * (s - alpha + 1 + R));
}

double gauss_stieltjes(double alpha, double x) {
  const double sa = std::sqrt(alpha);
  const double a = (1 - sa) * (1 - sa), b = (1 + sa) * (1 + sa);
  const double R = std::sqrt(std::max(0.0, (x - a) * (x - b)));
  return 2.0 / (x + alpha - 1 + R);
}

struct Poisson {
  double alpha, c;
  double C(double y) const { return c * y / (1 - y); }
  double Cp(double y) const { return c / ((1 - y) * (1 - y)); }
  double w(double y) const { return t_map(alpha, C(y)) / y; }
  double y_star() const {
    auto h = [&](double y) {
      const double Cy = C(y);
      return (2 * alpha * Cy + alpha + 1) * Cp(y) * y - t_map(alpha, Cy);
    };
    double lo = 1e-12, hi = 1 - 1e-12;
    return bracket_root(h, lo, hi, h(lo), h(hi));
  }
  // D(z): the root of w(y) = z^2 on (0, y*).
  double D(double z, double ystar) const {
    const double z2 = z * z;
    auto f = [&](double y) { return w(y) - z2; };
    const double lo = std::min(1.0 / z2, ystar);
    return bracket_root(f, lo, ystar, f(lo), f(ystar));
  }
};

double discrete_stieltjes(const SingularLaw& law, double x) {
  const auto& t = law.squared_support();
  const auto& w = law.discrete_weights();
  return kernels::active().recip_sum(x, t.data(), w.data(), t.size());
}

double d_from_g(double alpha, double z, double G) { return G * (alpha * z * z * G + 1 - alpha); }

double raw_d(const SingularLaw& law, double z) {
  const double a = law.aspect();
  return std::visit(overloaded{
                        [&](const GaussianLaw&) { return d_from_g(a, z, gauss_stieltjes(a, z * z)); },
                        [&](const RectPoissonLaw& p) {
                          return Poisson{a, p.c}.D(z, law.edge().h_bar);
                        },
                        [&](const auto&) { return d_from_g(a, z, discrete_stieltjes(law, z * z)); }},
                    law.kind());
}

EdgeData compute_edges(const SingularLaw& law) {
  const double a = law.aspect();
  EdgeData e;
  std::visit(overloaded{[&](const GaussianLaw&) {
                          e.gamma_bar = 1 + std::sqrt(a);
                          e.h_bar = 1 / std::sqrt(a);
                        },
                        [&](const RectPoissonLaw& p) {
                          Poisson P{a, p.c};
                          const double ys = P.y_star();
                          e.gamma_bar = std::sqrt(P.w(ys));
                          e.h_bar = ys;
                        },
                        [&](const auto&) {
                          const auto& t = law.squared_support();
                          const double top = t.empty() ? 0.0 : *std::max_element(t.begin(), t.end());
                          e.gamma_bar = std::sqrt(top);
                          if (e.gamma_bar == 0.0) {
                            e.h_bar = kInf;
                            return;
                          }
                          const double h = raw_d(law, e.gamma_bar * (1 + 1e-7));
                          e.h_bar = (h > kInfiniteEdgeCutoff || !std::isfinite(h)) ? kInf : h;
                        }},
             law.kind());
  return e;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

}  // namespace

SingularLaw::SingularLaw(double alpha, Kind kind) : alpha_(alpha), kind_(std::move(kind)) {
  require(alpha > 0 && alpha <= 1, "aspect ratio must lie in (0, 1]");
  if (auto* at = std::get_if<AtomicLaw>(&kind_)) {
    require(!at->atoms.empty() && at->atoms.size() == at->weights.size(), "atoms and weights must pair up");
    double total = 0;
    for (std::size_t i = 0; i < at->atoms.size(); ++i) {
      require(at->atoms[i] >= 0 && std::isfinite(at->atoms[i]), "atoms must be nonnegative");
      require(at->weights[i] >= 0, "weights must be nonnegative");
      total += at->weights[i];
    }
    require(std::abs(total - 1) <= 1e-12, "weights must sum to 1");
    for (std::size_t i = 0; i < at->atoms.size(); ++i) {
      if (at->weights[i] == 0) continue;
      sq_.push_back(at->atoms[i] * at->atoms[i]);
      w_.push_back(at->weights[i]);
    }
  } else if (auto* em = std::get_if<EmpiricalLaw>(&kind_)) {
    require(!em->samples.empty(), "empirical law needs samples");
    const double wt = 1.0 / static_cast<double>(em->samples.size());
    for (double s : em->samples) {
      require(s >= 0 && std::isfinite(s), "samples must be nonnegative");
      sq_.push_back(s * s);
      w_.push_back(wt);
    }
  } else if (auto* p = std::get_if<RectPoissonLaw>(&kind_)) {
    require(p->c > 0 && std::isfinite(p->c), "poisson rate must be positive");
  }
  edge_ = compute_edges(*this);
}

SingularLaw SingularLaw::gaussian(double alpha) { return SingularLaw(alpha, GaussianLaw{}); }
SingularLaw SingularLaw::rect_poisson(double alpha, double c) { return SingularLaw(alpha, RectPoissonLaw{c}); }
SingularLaw SingularLaw::atomic(double alpha, std::vector<double> atoms, std::vector<double> weights) {
  return SingularLaw(alpha, AtomicLaw{std::move(atoms), std::move(weights)});
}
SingularLaw SingularLaw::empirical(double alpha, std::vector<double> samples) {
  return SingularLaw(alpha, EmpiricalLaw{std::move(samples)});
}

std::string SingularLaw::describe() const {
  std::ostringstream os;
  os.precision(6);
  std::visit(overloaded{[&](const GaussianLaw&) { os << "gaussian"; },
                        [&](const RectPoissonLaw& p) { os << "rect_poisson(c=" << p.c << ")"; },
                        [&](const AtomicLaw& a) { os << "atomic(" << a.atoms.size() << " atoms)"; },
                        [&](const EmpiricalLaw& e) { os << "empirical(" << e.samples.size() << " samples)"; }},
             kind_);
  os << " alpha=" << alpha_;
  return os.str();
}

double t_map(double alpha, double z) {
  require(z >= -1, "t_map needs z >= -1");
  return (alpha * z + 1) * (z + 1);
}

double t_inverse(double alpha, double y) {
  require(y >= 0, "t_inverse needs y >= 0");
  // 2(y-1)/((a+1)+sqrt(.)) is the "+" root without cancellation near y = 1.
  const double disc = (alpha - 1) * (alpha - 1) + 4 * alpha * y;
  return 2 * (y - 1) / ((alpha + 1) + std::sqrt(disc));
}

double moment(const SingularLaw& law, int k) {
  require(k >= 1, "moment order must be >= 1");
  const double a = law.aspect();
  double m = std::visit(
      overloaded{[&](const GaussianLaw&) {
                   // Narayana polynomial
                   double s = 0;
                   std::vector<double> bk(k + 1, 1.0);
                   for (int j = 1; j <= k; ++j) bk[j] = bk[j - 1] * (k - j + 1) / j;
                   for (int j = 1; j <= k; ++j) s += bk[j] * bk[j - 1] / k * std::pow(a, j - 1);
                   return s;
                 },
                 [&](const RectPoissonLaw& p) {
                   if (k > kMaxCumulantOrder) throw DomainError("rect-poisson moment order capped at 16");
                   std::vector<double> kap(k, p.c);
                   return detail::series_moments(kap, a, k).back();
                 },
                 [&](const auto&) {
                   const auto& t = law.squared_support();
                   const auto& w = law.discrete_weights();
                   double s = 0;
                   for (std::size_t i = 0; i < t.size(); ++i) s += w[i] * std::pow(t[i], k);
                   return s;
                 }},
      law.kind());
  if (!std::isfinite(m)) throw NumericalError("moment " + std::to_string(k) + " is not finite");
  return m;
}

double stieltjes(const SingularLaw& law, double x) {
  const double g2 = law.edge().gamma_bar * law.edge().gamma_bar;
  const double a = law.aspect();
  return std::visit(overloaded{[&](const GaussianLaw&) {
                                 require(x >= g2 * (1 - 1e-15), "stieltjes needs x >= gamma_bar^2");
                                 return gauss_stieltjes(a, std::max(x, g2));
                               },
                               [&](const RectPoissonLaw& p) {
                                 require(x >= g2 * (1 - 1e-15), "stieltjes needs x >= gamma_bar^2");
                                 const double z = std::sqrt(std::max(x, g2));
                                 Poisson P{a, p.c};
                                 const double y = z <= law.edge().gamma_bar ? law.edge().h_bar : P.D(z, law.edge().h_bar);
                                 return (P.C(y) + 1) / x;
                               },
                               [&](const auto&) {
                                 require(x > g2, "stieltjes needs x > gamma_bar^2 for a discrete law");
                                 return discrete_stieltjes(law, x);
                               }},
                    law.kind());
}

namespace {

// G(s) - 1/s
double stieltjes_excess(const SingularLaw& law, double s) {
  const double a = law.aspect();
  return std::visit(overloaded{[&](const GaussianLaw&) { return gauss_excess(a, s); },
                               [&](const RectPoissonLaw& p) {
                                 Poisson P{a, p.c};
                                 const double z = std::sqrt(s);
                                 const double y = z <= law.edge().gamma_bar ? law.edge().h_bar : P.D(z, law.edge().h_bar);
                                 return P.C(y) / s;
                               },
                               [&](const auto&) {
                                 const auto& t = law.squared_support();
                                 const auto& w = law.discrete_weights();
                                 double acc = 0;
                                 for (std::size_t i = 0; i < t.size(); ++i) acc += w[i] * t[i] / (s - t[i]);
                                 return acc / s;
                               }},
                    law.kind());
}

}  // namespace

double log_potential(const SingularLaw& law, double x) {
  const double g2 = law.edge().gamma_bar * law.edge().gamma_bar;
  if (!law.squared_support().empty()) {
    require(x > g2, "log potential of a discrete law needs x > gamma_bar^2");
    const auto& t = law.squared_support();
    const auto& w = law.discrete_weights();
    double s = 0;
    for (std::size_t i = 0; i < t.size(); ++i) s += w[i] * std::log(x - t[i]);
    return s;
  }
  require(x >= g2 * (1 - 1e-15), "log potential needs x >= gamma_bar^2");
  x = std::max(x, g2);
  // ln x - int_x^inf (G(s) - 1/s) ds, with s = x/u.
  auto f = [&](double u) {
    if (u <= 0) return law.is_gaussian() ? 1.0 / x : moment(law, 1) / x;
    return stieltjes_excess(law, x / u) * x / (u * u);
  };
  return std::log(x) - integrate(f, 0.0, 1.0, 1e-13);
}

double d_transform(const SingularLaw& law, double z) {
  require(z > law.edge().gamma_bar, "d_transform needs z > gamma_bar");
  return raw_d(law, z);
}

double d_inverse(const SingularLaw& law, double y) {
  require(y > 0, "d_inverse needs y > 0");
  require(y < law.edge().h_bar, "d_inverse needs y < h_bar");
  const double a = law.aspect();
  if (law.is_gaussian()) return std::sqrt(t_map(a, y) / y);
  if (auto* p = std::get_if<RectPoissonLaw>(&law.kind())) return std::sqrt(Poisson{a, p->c}.w(y));
  const double gb = law.edge().gamma_bar;
  auto f = [&](double z) { return raw_d(law, z) - y; };
  double lo = gb > 0 ? gb * (1 + 1e-7) : 0.5 / std::sqrt(y);
  double flo = f(lo);
  while (!(flo > 0)) {
    // soft top sample: the root sits closer to the edge than the h_bar probe
    lo = gb > 0 ? gb + 0.5 * (lo - gb) : 0.5 * lo;
    if (gb > 0 && lo - gb < 1e-15 * gb) throw NumericalError("d_inverse could not bracket near the edge");
    flo = f(lo);
  }
  double hi = std::max(2 * lo, 2 / std::sqrt(y));
  double fhi = f(hi);
  while (fhi > 0) {
    hi *= 2;
    fhi = f(hi);
  }
  return bracket_root(f, lo, hi, flo, fhi);
}

double rect_r(const SingularLaw& law, double z) {
  require(z >= 0, "rect_r needs z >= 0");
  // the closed form continues analytically up to its pole
  if (auto* p = std::get_if<RectPoissonLaw>(&law.kind())) {
    require(z < 1, "rect_r needs z < 1 for rect-poisson");
    return Poisson{law.aspect(), p->c}.C(z);
  }
  require(z < law.edge().h_bar, "rect_r needs z < h_bar");
  if (z == 0) return 0.0;
  if (law.is_gaussian()) return z;
  const double nu = d_inverse(law, z);
  return t_inverse(law.aspect(), z * nu * nu);
}

double rect_r_derivative(const SingularLaw& law, double z) {
  if (law.is_gaussian()) {
    require(z >= 0 && z < law.edge().h_bar, "rect_r_derivative outside the domain");
    return 1.0;
  }
  if (auto* p = std::get_if<RectPoissonLaw>(&law.kind())) {
    require(z >= 0 && z < 1, "rect_r_derivative outside the domain");
    return Poisson{law.aspect(), p->c}.Cp(z);
  }
  const double h = std::max(1e-6, 1e-6 * z);
  if (z - h <= 0 || z + h >= law.edge().h_bar) throw DomainError("rect_r_derivative stencil leaves the domain");
  auto central = [&](double s) { return (rect_r(law, z + s) - rect_r(law, z - s)) / (2 * s); };
  return (4 * central(h / 2) - central(h)) / 3;
}

double rect_r_closed(const SingularLaw& law, double z) {
  const EdgeData& e = law.edge();
  if (z < e.h_bar) return rect_r(law, z);
  require(z == e.h_bar, "rect_r_closed needs z <= h_bar");
  return t_inverse(law.aspect(), e.h_bar * e.gamma_bar * e.gamma_bar);
}

double rect_r_derivative_closed(const SingularLaw& law, double z) {
  try {
    return rect_r_derivative(law, z);
  } catch (const DomainError&) {
    // one-sided difference at the edge of the domain
    const double h = 1e-5 * z;
    return (rect_r_closed(law, z) - rect_r_closed(law, z - h)) / h;
  }
}

EdgeData edges(const SingularLaw& law) { return law.edge(); }

CumulantSequence cumulants_from_moments(const std::vector<double>& moments, double alpha, int J) {
  require(J >= 1 && J <= kMaxCumulantOrder, "cumulant order must lie in [1, 16]");
  require(alpha > 0 && alpha <= 1, "aspect ratio must lie in (0, 1]");
  return CumulantSequence{alpha, detail::series_cumulants(moments, alpha, J)};
}

std::vector<double> moments_from_cumulants(const CumulantSequence& kappas, int J) {
  require(J >= 1 && J <= kappas.order(), "not enough cumulants");
  return detail::series_moments(kappas.kappas, kappas.aspect, J);
}

CumulantSequence law_cumulants(const SingularLaw& law, int J) {
  require(J >= 1 && J <= kMaxCumulantOrder, "cumulant order must lie in [1, 16]");
  const double a = law.aspect();
  if (law.is_gaussian()) {
    CumulantSequence c{a, std::vector<double>(J, 0.0)};
    c.kappas[0] = 1.0;
    return c;
  }
  if (auto* p = std::get_if<RectPoissonLaw>(&law.kind())) return CumulantSequence{a, std::vector<double>(J, p->c)};
  std::vector<double> m(J);
  for (int k = 1; k <= J; ++k) m[k - 1] = moment(law, k);
  return cumulants_from_moments(m, a, J);
}

double sticking_theta2(const SingularLaw& law) { return law.edge().h_bar; }

std::pair<double, double> high_temp_stationary(const SingularLaw& law, double theta) {
  if (theta == 0.0) return {1.0, 1.0};
  const double a = law.aspect();
  const double th2 = theta * theta;
  if (!(th2 < sticking_theta2(law)))
    throw DomainError("low-temperature regime: no stationary point at this theta");
  const double g2 = law.edge().gamma_bar * law.edge().gamma_bar;
  auto z2_of = [&](double z1) { return a * (z1 - 1) + 1; };
  auto f = [&](double z1) {
    const double z2 = z2_of(z1);
    return a * z1 * stieltjes(law, z1 * z2 / th2) / th2 + (1 - a) / z2 - 1;
  };
  double lo = 1 + t_inverse(a, th2 * g2);
  if (!law.squared_support().empty() || g2 == 0) lo += 1e-13 * std::max(1.0, std::abs(lo));
  double flo = f(lo);
  if (!(flo > 0)) throw DomainError("low-temperature regime: stationary equation has no root");
  double hi = lo + 1;
  double fhi = f(hi);
  while (fhi > 0) {
    hi = lo + 2 * (hi - lo);
    fhi = f(hi);
  }
  const double z1 = bracket_root(f, lo, hi, flo, fhi);
  return {z1, z2_of(z1)};
}

}  // namespace spikebench
