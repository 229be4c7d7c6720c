#include "spikebench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "spikebench/bayes_theory.hpp"
#include "spikebench/error.hpp"
#include "spikebench/spectral.hpp"

namespace spikebench {

double assumed_lambda(const MismatchRule& rule, double lambda_star) {
  if (std::holds_alternative<Matched>(rule)) return lambda_star;
  if (auto* s = std::get_if<Scaled>(&rule)) return s->factor * lambda_star;
  return std::get<Fixed>(rule).lambda;
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::BayesTheory:
      return "bayes_theory";
    case Estimator::Amp:
      return "amp";
    case Estimator::Se:
      return "se";
    case Estimator::OptSpec:
      return "optspec";
    case Estimator::GauSpec:
      return "gauspec";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  for (Estimator e : {Estimator::BayesTheory, Estimator::Amp, Estimator::Se, Estimator::OptSpec, Estimator::GauSpec})
    if (estimator_name(e) == name) return e;
  throw ConfigError("unknown estimator '" + name + "'");
}

Eigen::Index ExperimentConfig::rows() const {
  return n > 0 ? n : static_cast<Eigen::Index>(std::llround(aspect * static_cast<double>(m)));
}

Eigen::Index ExperimentConfig::spectral_cols() const { return spectral_m > 0 ? spectral_m : m; }

Eigen::Index ExperimentConfig::spectral_rows() const {
  if (spectral_m <= 0) return rows();
  return static_cast<Eigen::Index>(std::llround(aspect * static_cast<double>(spectral_m)));
}

bool ExperimentConfig::has(Estimator e) const {
  return std::find(estimators.begin(), estimators.end(), e) != estimators.end();
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.aspect > 0 && cfg.aspect <= 1)) throw ConfigError("aspect must lie in (0, 1]");
  if (cfg.m < 2) throw ConfigError("m must be at least 2");
  if (cfg.rows() < 1) throw ConfigError("n must be positive");
  if (std::abs(static_cast<double>(cfg.rows()) / static_cast<double>(cfg.m) - cfg.aspect) > 1.0 / static_cast<double>(cfg.m))
    throw ConfigError("n/m must equal the aspect ratio within 1/m");
  if (cfg.lambda_star_grid.empty()) throw ConfigError("lambda_star_grid must be nonempty");
  for (double l : cfg.lambda_star_grid)
    if (!(l > 0) || !std::isfinite(l)) throw ConfigError("lambda* values must be positive");
  if (auto* s = std::get_if<Scaled>(&cfg.rule); s && !(s->factor > 0)) throw ConfigError("scale factor must be positive");
  if (auto* f = std::get_if<Fixed>(&cfg.rule); f && !(f->lambda > 0)) throw ConfigError("fixed lambda must be positive");
  if (cfg.estimators.empty()) throw ConfigError("no estimators selected");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.spectral_trials < 0) throw ConfigError("spectral_trials must be >= 0");
  try {
    validate(cfg.amp);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("amp: ") + e.what());
  }
  if (cfg.amp.t_max > kMaxCumulantOrder / 2) throw ConfigError("amp.t_max is capped at 8 by the cumulant order");
  if (cfg.mc.samples < kMinMcSamples) throw ConfigError("mc.samples must be >= 10000");
  if (cfg.has(Estimator::Se) && cfg.amp.denoiser.kind == DenoiserKind::SphereProjection)
    throw ConfigError("state evolution needs a separable denoiser");
}

namespace {

constexpr double kMaxFailureFraction = 0.10;

int worker_count() {
  int w = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SPIKEBENCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) w = static_cast<int>(v);
  }
  return w;
}

// Runs f(0..count-1) on a bounded pool. Each task writes only its own slot.
template <class F>
void parallel_for(int count, F f) {
  const int workers = std::min(worker_count(), std::max(count, 1));
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i = next++; i < count; i = next++) f(i);
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

struct TrialOutcome {
  std::optional<double> amp_mse, amp_overlap;
  std::vector<AmpIterate> amp_history;
  std::optional<double> os_mse, os_overlap, gs_mse, gs_overlap;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
};

struct Stats {
  double mean = 0.0, se = 0.0;
  int count = 0;
};

// Fixed summation order (trial index), so the result is schedule independent.
Stats summarize(const std::vector<double>& xs) {
  Stats s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / (s.count - 1) / s.count);
  }
  return s;
}

void run_trial(const ExperimentConfig& cfg, std::size_t grid, int trial, TrialOutcome& out) {
  const double ls = cfg.lambda_star_grid[grid];
  const double lam = assumed_lambda(cfg.rule, ls);
  const std::uint64_t seed = trial_seed(cfg.base_seed, static_cast<std::uint32_t>(grid), static_cast<std::uint32_t>(trial));
  out.seed = seed;
  const bool want_amp = cfg.has(Estimator::Amp) && trial < cfg.trials;
  const bool want_spec =
      (cfg.has(Estimator::OptSpec) || cfg.has(Estimator::GauSpec)) && trial < cfg.spectral_trial_count();
  try {
    std::optional<SpikedInstance> amp_inst;
    if (want_amp) {
      amp_inst = build_instance(ls, cfg.noise, cfg.rows(), cfg.m, seed);
      AmpConfig ac = cfg.amp;
      ac.lambda_assumed = lam;
      Rng rng(derive_seed(seed, 0xa3b1ULL));
      const AmpState st = run_amp(*amp_inst, ac, rng);
      out.amp_mse = st.history.back().mse;
      out.amp_overlap = st.history.back().overlap;
      out.amp_history = st.history;
    }
    if (want_spec) {
      const bool same = cfg.spectral_cols() == cfg.m && amp_inst.has_value();
      const SpikedInstance inst =
          same ? *amp_inst : build_instance(ls, cfg.noise, cfg.spectral_rows(), cfg.spectral_cols(), seed);
      const SingularTriplet tr = top_singular_triplet(inst.Y, inst.seed);
      const double ovl = overlap_of(tr.u, tr.v, inst);
      if (cfg.has(Estimator::OptSpec)) {
        const double J = j_scaling(noise_law(inst.noise, inst.aspect), ls);
        out.os_mse = mse_rank_one(J * tr.u, tr.v, inst);
        out.os_overlap = ovl;
      }
      if (cfg.has(Estimator::GauSpec)) {
        const double J = j_scaling(SingularLaw::gaussian(inst.aspect), lam);
        out.gs_mse = mse_rank_one(J * tr.u, tr.v, inst);
        out.gs_overlap = ovl;
      }
    }
  } catch (const NumericalError& e) {
    out.failed = true;
    out.error = e.what();
  }
}

ResultRecord make_record(const std::string& est, double ls, double lam, const std::string& metric, double value,
                         double se, Eigen::Index n, Eigen::Index m, int trials, std::uint64_t seed) {
  return ResultRecord{est, ls, lam, metric, value, se, static_cast<std::int64_t>(n), static_cast<std::int64_t>(m),
                      trials, seed};
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  RunReport rep;
  const SingularLaw law = noise_law(cfg.noise, cfg.aspect);
  const std::size_t G = cfg.lambda_star_grid.size();
  const Eigen::Index n = cfg.rows(), m = cfg.m;

  // deterministic curves first
  for (std::size_t g = 0; g < G; ++g) {
    const double ls = cfg.lambda_star_grid[g];
    const double lam = assumed_lambda(cfg.rule, ls);
    if (cfg.has(Estimator::BayesTheory)) {
      const TheoryPoint p = theory_point(law, lam, ls);
      if (p.m_negative)
        std::cerr << "warning: M = " << p.M << " < 0 at lambda*=" << ls << ", lambda=" << lam << "\n";
      rep.records.push_back(make_record("bayes_theory", ls, lam, "mse", p.mse, 0, n, m, 0, 0));
      rep.records.push_back(make_record("bayes_theory", ls, lam, "overlap", p.overlap, 0, n, m, 0, 0));
    }
    if (cfg.has(Estimator::Se)) {
      const Denoisers den = Denoisers::make(cfg.amp.denoiser, lam, cfg.aspect, cfg.amp.init_corr, cfg.amp.t_max);
      const CumulantSequence kap = law_cumulants(law, 2 * cfg.amp.t_max);
      const SEMetrics last =
          run_se(ls, cfg.aspect, cfg.amp.init_corr, kap, den, cfg.amp.t_max, cfg.mc).metrics.back();
      rep.records.push_back(make_record("se", ls, lam, "mse", last.mse, 0, n, m, 0, cfg.mc.seed));
      rep.records.push_back(make_record("se", ls, lam, "overlap", last.overlap, 0, n, m, 0, cfg.mc.seed));
    }
    if (cfg.has(Estimator::OptSpec) || cfg.has(Estimator::GauSpec)) {
      const SpectralTheory st = spectral_theory_mse(law, lam, ls);
      const Eigen::Index sn = cfg.spectral_rows(), sm = cfg.spectral_cols();
      if (cfg.has(Estimator::OptSpec)) {
        rep.records.push_back(make_record("optspec_theory", ls, lam, "mse", st.mse_os, 0, sn, sm, 0, 0));
        rep.records.push_back(make_record("optspec_theory", ls, lam, "overlap", st.j_os, 0, sn, sm, 0, 0));
      }
      if (cfg.has(Estimator::GauSpec))
        rep.records.push_back(make_record("gauspec_theory", ls, lam, "mse", st.mse_gs, 0, sn, sm, 0, 0));
    }
  }

  // Monte Carlo trials
  const bool any_amp = cfg.has(Estimator::Amp);
  const bool any_spec = cfg.has(Estimator::OptSpec) || cfg.has(Estimator::GauSpec);
  const int per_grid = std::max(any_amp ? cfg.trials : 0, any_spec ? cfg.spectral_trial_count() : 0);
  if (per_grid == 0) return rep;
  std::vector<TrialOutcome> outcomes(G * static_cast<std::size_t>(per_grid));
  parallel_for(static_cast<int>(outcomes.size()), [&](int idx) {
    run_trial(cfg, static_cast<std::size_t>(idx / per_grid), idx % per_grid, outcomes[static_cast<std::size_t>(idx)]);
  });

  for (std::size_t g = 0; g < G; ++g) {
    const double ls = cfg.lambda_star_grid[g];
    const double lam = assumed_lambda(cfg.rule, ls);
    int failed = 0;
    std::vector<double> am, ao, om, oo, gm, go;
    for (int t = 0; t < per_grid; ++t) {
      const TrialOutcome& o = outcomes[g * per_grid + t];
      if (o.failed) {
        ++failed;
        std::cerr << "warning: trial " << t << " at lambda*=" << ls << " failed: " << o.error << "\n";
        continue;
      }
      if (o.amp_mse) am.push_back(*o.amp_mse), ao.push_back(*o.amp_overlap);
      if (o.os_mse) om.push_back(*o.os_mse), oo.push_back(*o.os_overlap);
      if (o.gs_mse) gm.push_back(*o.gs_mse), go.push_back(*o.gs_overlap);
    }
    rep.failed_trials += failed;
    if (failed > kMaxFailureFraction * per_grid)
      throw NumericalError(std::to_string(failed) + " of " + std::to_string(per_grid) + " trials failed at lambda*=" +
                           std::to_string(ls));
    auto emit = [&](const char* est, const std::vector<double>& mse, const std::vector<double>& ovl, Eigen::Index rn,
                    Eigen::Index cm) {
      if (mse.empty()) return;
      const Stats a = summarize(mse), b = summarize(ovl);
      rep.records.push_back(make_record(est, ls, lam, "mse", a.mean, a.se, rn, cm, a.count, cfg.base_seed));
      rep.records.push_back(make_record(est, ls, lam, "overlap", b.mean, b.se, rn, cm, b.count, cfg.base_seed));
    };
    emit("amp", am, ao, n, m);
    emit("optspec", om, oo, cfg.spectral_rows(), cfg.spectral_cols());
    emit("gauspec", gm, go, cfg.spectral_rows(), cfg.spectral_cols());
    if (cfg.emit_trials) {
      for (int t = 0; t < per_grid; ++t) {
        const TrialOutcome& o = outcomes[g * per_grid + t];
        if (o.failed) continue;
        auto one = [&](const char* est, const std::optional<double>& mse, const std::optional<double>& ovl,
                       Eigen::Index rn, Eigen::Index cm) {
          if (!mse) return;
          rep.records.push_back(make_record(est, ls, lam, "mse", *mse, 0, rn, cm, 1, o.seed));
          rep.records.push_back(make_record(est, ls, lam, "overlap", *ovl, 0, rn, cm, 1, o.seed));
        };
        one("amp_trial", o.amp_mse, o.amp_overlap, n, m);
        one("optspec_trial", o.os_mse, o.os_overlap, cfg.spectral_rows(), cfg.spectral_cols());
        one("gauspec_trial", o.gs_mse, o.gs_overlap, cfg.spectral_rows(), cfg.spectral_cols());
      }
    }
    for (int t = 0; t < per_grid; ++t) {
      const TrialOutcome& o = outcomes[g * per_grid + t];
      if (o.failed) continue;
      for (const AmpIterate& h : o.amp_history)
        rep.amp_iterations.push_back(
            AmpRow{ls, lam, t, o.seed, h.t, h.overlap, h.mse, h.norm_u2, h.norm_v2, h.alpha_t, h.beta_t});
    }
  }
  return rep;
}

std::vector<SeRow> se_iterations(const ExperimentConfig& cfg) {
  validate(cfg);
  const SingularLaw law = noise_law(cfg.noise, cfg.aspect);
  const CumulantSequence kap = law_cumulants(law, 2 * cfg.amp.t_max);
  std::vector<SeRow> rows;
  for (double ls : cfg.lambda_star_grid) {
    const double lam = assumed_lambda(cfg.rule, ls);
    const Denoisers den = Denoisers::make(cfg.amp.denoiser, lam, cfg.aspect, cfg.amp.init_corr, cfg.amp.t_max);
    const SEState st = run_se(ls, cfg.aspect, cfg.amp.init_corr, kap, den, cfg.amp.t_max, cfg.mc);
    for (const SEMetrics& mt : st.metrics)
      rows.push_back(SeRow{ls, lam, mt.t, mt.overlap, mt.mse, st.nu_vec[mt.t - 1], st.mu_vec[mt.t - 1]});
  }
  return rows;
}

std::vector<double> fig1_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 16; ++k) g.push_back(0.5 * k);
  return g;
}

ExperimentConfig fig1_preset(Fig1Side side, Scale scale) {
  ExperimentConfig c;
  c.aspect = 0.6;
  c.lambda_star_grid = fig1_grid();
  c.estimators = {Estimator::BayesTheory, Estimator::Amp, Estimator::Se, Estimator::OptSpec, Estimator::GauSpec};
  c.amp.t_max = 8;
  c.amp.init_corr = 0.2;
  if (side == Fig1Side::PoissonMatched) {
    c.noise = RectPoissonNoise{1.0};
    c.rule = Matched{};
    c.output_dir = "fig1_poisson_matched";
  } else {
    c.noise = GaussianNoise{};
    c.rule = Scaled{4.0};
    c.output_dir = "fig1_gaussian_scaled4";
  }
  if (scale == Scale::Paper) {
    c.m = 20000;
    c.spectral_m = 10000;
    c.trials = 100;
    c.spectral_trials = 20;
  } else {
    c.m = 2000;
    c.trials = 20;
  }
  return c;
}

}  // namespace spikebench
