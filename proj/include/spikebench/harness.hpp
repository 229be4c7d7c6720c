#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "spikebench/amp.hpp"
#include "spikebench/ensembles.hpp"
#include "spikebench/state_evolution.hpp"

namespace spikebench {

struct Matched {};
struct Scaled {
  double factor = 1.0;
};
struct Fixed {
  double lambda = 1.0;
};
using MismatchRule = std::variant<Matched, Scaled, Fixed>;

double assumed_lambda(const MismatchRule& rule, double lambda_star);

enum class Estimator { BayesTheory, Amp, Se, OptSpec, GauSpec };
std::string estimator_name(Estimator e);
Estimator parse_estimator(const std::string& name);

struct ExperimentConfig {
  NoiseSpec noise = GaussianNoise{};
  double aspect = 0.6;
  Eigen::Index m = 2000;
  Eigen::Index n = 0;           // 0: round(aspect m)
  Eigen::Index spectral_m = 0;  // 0: same as m
  std::vector<double> lambda_star_grid;
  MismatchRule rule = Matched{};
  std::vector<Estimator> estimators;
  int trials = 20;
  int spectral_trials = 0;  // 0: same as trials
  std::uint64_t base_seed = 1;
  AmpConfig amp;
  MCConfig mc;
  std::string output_dir = "out";
  bool emit_trials = false;  // also return one row per trial

  Eigen::Index rows() const;
  Eigen::Index spectral_cols() const;
  Eigen::Index spectral_rows() const;
  int spectral_trial_count() const { return spectral_trials > 0 ? spectral_trials : trials; }
  bool has(Estimator e) const;
};

// Throws ConfigError.
void validate(const ExperimentConfig& cfg);

struct ResultRecord {
  std::string estimator;
  double lambda_star = 0.0;
  double lambda = 0.0;
  std::string metric;  // "mse" or "overlap"
  double value = 0.0;
  double stderr_ = 0.0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t trials = 0;  // 0 for deterministic theory rows
  std::uint64_t seed = 0;

  bool operator==(const ResultRecord&) const = default;
};

// One AMP iterate of one trial.
struct AmpRow {
  double lambda_star, lambda;
  int trial;
  std::uint64_t seed;
  int t;
  double overlap, mse, norm_u2, norm_v2, alpha_t, beta_t;
};

struct RunReport {
  std::vector<ResultRecord> records;
  std::vector<AmpRow> amp_iterations;  // trial order within each grid point
  int failed_trials = 0;
};

// Trials run on a pool bounded by SPIKEBENCH_THREADS; results do not depend on scheduling.
RunReport run_experiment(const ExperimentConfig& cfg);

// Per-iteration state evolution at every grid point.
struct SeRow {
  double lambda_star, lambda;
  int t;
  double overlap, mse, nu, mu;
};
std::vector<SeRow> se_iterations(const ExperimentConfig& cfg);

enum class Fig1Side { PoissonMatched, GaussianScaled4 };
enum class Scale { Paper, Desk };
ExperimentConfig fig1_preset(Fig1Side side, Scale scale);
std::vector<double> fig1_grid();

}  // namespace spikebench
