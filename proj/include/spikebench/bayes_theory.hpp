#pragma once

#include <string>

#include "spikebench/transforms.hpp"

namespace spikebench {

enum class Regime { SpikeLowTemp, BulkLowTemp, HighTemp };

std::string regime_name(Regime r);

struct RegimeFlags {
  bool spike_present = false;    // h_bar lambda* >= 1
  bool low_temperature = false;  // lambda above the sticking threshold
  Regime regime = Regime::HighTemp;
};

struct TheoryPoint {
  double lambda = 0.0;       // assumed SNR
  double lambda_star = 0.0;  // true SNR
  Regime regime = Regime::HighTemp;
  double M = 0.0;
  double Q = 0.0;
  double mse = 0.5;
  double overlap = 0.0;
  bool m_negative = false;  // M < -1e-10 as evaluated; reported, never clamped
};

RegimeFlags classify_regime(const SingularLaw& law, double lambda, double lambda_star);
// Almost-sure limit of the top singular value of the spiked matrix.
double bbp_top_singular(const SingularLaw& law, double lambda_star);
// lambda_bar = alpha D(nu_bar+).
double sticking_threshold(const SingularLaw& law, double lambda_star);
double m_value(const SingularLaw& law, double lambda, double lambda_star);
double q_value(const SingularLaw& law, double lambda, double lambda_star);
double bayes_mse(const SingularLaw& law, double lambda, double lambda_star);
double bayes_overlap(const SingularLaw& law, double lambda, double lambda_star);
// Limiting free energy of the mismatched posterior with no side information.
double log_partition(const SingularLaw& law, double lambda, double lambda_star);
TheoryPoint theory_point(const SingularLaw& law, double lambda, double lambda_star);

}  // namespace spikebench
