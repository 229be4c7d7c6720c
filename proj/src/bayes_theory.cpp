#include "spikebench/bayes_theory.hpp"

#include <cmath>

#include "spikebench/error.hpp"
#include "spikebench/quadrature.hpp"

namespace spikebench {

namespace {

void check_snr(double lambda, double lambda_star) {
  if (!(lambda >= 0) || !(lambda_star >= 0)) throw DomainError("SNRs must be nonnegative");
}

template <class F>
auto with_context(const char* what, Regime r, F f) {
  try {
    return f();
  } catch (const DomainError& ex) {
    throw DomainError(std::string(what) + " in regime " + regime_name(r) + ": " + ex.what());
  } catch (const NumericalError& ex) {
    throw NumericalError(std::string(what) + " in regime " + regime_name(r) + ": " + ex.what());
  }
}

struct SpikeTerms {
  double C, Cp, Tc, K;
};

SpikeTerms spike_terms(const SingularLaw& law, double lambda, double lambda_star) {
  const double a = law.aspect();
  const double y0 = 1.0 / lambda_star;
  SpikeTerms s;
  s.C = rect_r_closed(law, y0);
  s.Cp = rect_r_derivative_closed(law, y0);
  s.Tc = t_map(a, s.C);
  const double R = t_inverse(a, lambda * lambda_star / a * s.Tc);
  s.K = (s.C - R) / s.Tc;
  return s;
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::SpikeLowTemp:
      return "spike_low_temp";
    case Regime::BulkLowTemp:
      return "bulk_low_temp";
    case Regime::HighTemp:
      return "high_temp";
  }
  return "unknown";
}

RegimeFlags classify_regime(const SingularLaw& law, double lambda, double lambda_star) {
  check_snr(lambda, lambda_star);
  const double a = law.aspect();
  const double hb = law.edge().h_bar;
  RegimeFlags f;
  f.spike_present = hb * lambda_star >= 1.0;
  if (f.spike_present && lambda * lambda_star > a) {
    f.regime = Regime::SpikeLowTemp;
  } else if (!f.spike_present && lambda > a * hb) {
    f.regime = Regime::BulkLowTemp;
  }
  f.low_temperature = f.regime != Regime::HighTemp;
  return f;
}

double bbp_top_singular(const SingularLaw& law, double lambda_star) {
  if (!(lambda_star > 0)) throw DomainError("bbp_top_singular needs lambda* > 0");
  const EdgeData& e = law.edge();
  const double y0 = 1.0 / lambda_star;
  if (y0 >= e.h_bar) return e.gamma_bar;
  return d_inverse(law, y0);
}

double sticking_threshold(const SingularLaw& law, double lambda_star) {
  if (!(lambda_star >= 0)) throw DomainError("lambda* must be nonnegative");
  const double a = law.aspect();
  if (law.edge().h_bar * lambda_star >= 1.0) return a / lambda_star;
  return a * law.edge().h_bar;
}

double m_value(const SingularLaw& law, double lambda, double lambda_star) {
  const RegimeFlags f = classify_regime(law, lambda, lambda_star);
  if (f.regime != Regime::SpikeLowTemp) return 0.0;
  return with_context("M", f.regime, [&] {
    const double a = law.aspect();
    const SpikeTerms s = spike_terms(law, lambda, lambda_star);
    const double y0 = 1.0 / lambda_star;
    return a * std::sqrt(1.0 / (lambda * lambda_star)) * s.K * (y0 * s.Cp * (2 * a * s.C + a + 1) - s.Tc);
  });
}

double q_value(const SingularLaw& law, double lambda, double lambda_star) {
  const RegimeFlags f = classify_regime(law, lambda, lambda_star);
  const double a = law.aspect();
  if (f.regime == Regime::SpikeLowTemp) {
    return with_context("Q", f.regime, [&] {
      const SpikeTerms s = spike_terms(law, lambda, lambda_star);
      return 1.0 - a / (lambda * lambda_star) * (1.0 - s.K * (2 * a * s.C + a + 1));
    });
  }
  if (f.regime == Regime::BulkLowTemp) {
    const EdgeData& e = law.edge();
    if (!std::isfinite(e.h_bar)) throw DomainError("bulk regime requested for a law with infinite h_bar");
    return with_context("Q", f.regime, [&] {
      const double g2 = e.gamma_bar * e.gamma_bar;
      const double r1 = t_inverse(a, g2 * e.h_bar);
      const double r2 = t_inverse(a, lambda * g2 / a);
      return 1.0 - a / lambda * (e.h_bar - (r1 - r2) / g2 * (2 * a * r1 + a + 1));
    });
  }
  return 0.0;
}

double bayes_mse(const SingularLaw& law, double lambda, double lambda_star) {
  return 0.5 * (1.0 - 2.0 * m_value(law, lambda, lambda_star) + q_value(law, lambda, lambda_star));
}

double bayes_overlap(const SingularLaw& law, double lambda, double lambda_star) {
  const double Q = q_value(law, lambda, lambda_star);
  if (!(Q > 1e-14)) return 0.0;
  return m_value(law, lambda, lambda_star) / std::sqrt(Q);
}

double log_partition(const SingularLaw& law, double lambda, double lambda_star) {
  const RegimeFlags f = classify_regime(law, lambda, lambda_star);
  if (lambda == 0.0) return 0.0;
  const double a = law.aspect();
  return with_context("log-partition", f.regime, [&] {
    auto g = [&](double x) {
      const double R = t_inverse(a, lambda * x / a);
      const double lp = a * log_potential(law, x) + (1 - a) * std::log(x);
      return -1.0 / (2 * a) * (lp - 2 * a * R + (a - 1) * std::log(R + 1) + std::log(lambda / a));
    };
    if (f.regime == Regime::SpikeLowTemp) {
      const double nu = bbp_top_singular(law, lambda_star);
      return g(nu * nu);
    }
    if (f.regime == Regime::BulkLowTemp) {
      const double gb = law.edge().gamma_bar;
      return g(gb * gb);
    }
    const double top = std::sqrt(lambda / a);
    return integrate([&](double t) { return t > 0 ? rect_r_closed(law, t * t) / t : 0.0; }, 0.0, top);
  });
}

TheoryPoint theory_point(const SingularLaw& law, double lambda, double lambda_star) {
  TheoryPoint p;
  p.lambda = lambda;
  p.lambda_star = lambda_star;
  p.regime = classify_regime(law, lambda, lambda_star).regime;
  p.M = m_value(law, lambda, lambda_star);
  p.Q = q_value(law, lambda, lambda_star);
  p.mse = 0.5 * (1.0 - 2.0 * p.M + p.Q);
  p.overlap = p.Q > 1e-14 ? p.M / std::sqrt(p.Q) : 0.0;
  p.m_negative = p.M < -1e-10;
  return p;
}

}  // namespace spikebench
