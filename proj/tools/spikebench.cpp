// spikebench: theory curves, AMP, state evolution and spectral baselines for spiked
// rectangular matrices with rotationally invariant noise.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "spikebench/config.hpp"
#include "spikebench/error.hpp"
#include "spikebench/harness.hpp"
#include "spikebench/records.hpp"

namespace fs = std::filesystem;
using namespace spikebench;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string scale = "desk";
  std::string format = "both";
  std::string side = "poisson_matched";
};

ExperimentConfig base_config(const Options& o) {
  ExperimentConfig c = o.config.empty() ? fig1_preset(Fig1Side::PoissonMatched, Scale::Desk) : load_config(o.config);
  if (o.seed) c.base_seed = *o.seed;
  if (!o.out.empty()) c.output_dir = o.out;
  return c;
}

void write_outputs(const ExperimentConfig& c, const std::vector<ResultRecord>& recs, const std::string& stem,
                   const std::string& format) {
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) throw IoError("cannot create '" + c.output_dir + "': " + ec.message());
  const fs::path dir(c.output_dir);
  if (format == "csv" || format == "both") emit_csv(recs, (dir / (stem + ".csv")).string());
  if (format == "svg" || format == "both") emit_svg(recs, (dir / (stem + ".svg")).string());
  std::ofstream meta(dir / (stem + ".config.json"));
  if (!meta) throw IoError("cannot write run metadata");
  meta << config_to_json(c);
  std::cout << "wrote " << recs.size() << " records to " << (dir / stem).string() << ".*\n";
}

std::ofstream open_table(const ExperimentConfig& c, const std::string& name, fs::path& path) {
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  path = fs::path(c.output_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(17);
  return out;
}

void write_amp_iterations(const ExperimentConfig& c, const std::vector<AmpRow>& rows) {
  fs::path path;
  std::ofstream out = open_table(c, "amp_iterations.csv", path);
  out << "lambda_star,lambda,trial,seed,t,overlap,mse,norm_u2,norm_v2,alpha_t,beta_t\n";
  for (const AmpRow& r : rows)
    out << r.lambda_star << "," << r.lambda << "," << r.trial << "," << r.seed << "," << r.t << "," << r.overlap << ","
        << r.mse << "," << r.norm_u2 << "," << r.norm_v2 << "," << r.alpha_t << "," << r.beta_t << "\n";
  std::cout << "wrote " << rows.size() << " rows to " << path.string() << "\n";
}

int run_subset(const Options& o, const std::string& stem, std::vector<Estimator> only, bool per_trial) {
  ExperimentConfig c = base_config(o);
  if (!only.empty()) c.estimators = std::move(only);
  c.emit_trials = c.emit_trials || per_trial;
  const RunReport rep = run_experiment(c);
  if (rep.failed_trials > 0) std::cerr << "warning: " << rep.failed_trials << " trials failed and were excluded\n";
  write_outputs(c, rep.records, stem, o.format);
  if (stem == "amp") write_amp_iterations(c, rep.amp_iterations);
  return 0;
}

int run_se_rows(const Options& o) {
  ExperimentConfig c = base_config(o);
  c.estimators = {Estimator::Se};
  const auto rows = se_iterations(c);
  fs::path path;
  std::ofstream out = open_table(c, "se_iterations.csv", path);
  out << "lambda_star,lambda,t,overlap,mse,nu,mu\n";
  for (const SeRow& r : rows)
    out << r.lambda_star << "," << r.lambda << "," << r.t << "," << r.overlap << "," << r.mse << "," << r.nu << ","
        << r.mu << "\n";
  std::cout << "wrote " << rows.size() << " rows to " << path.string() << "\n";
  return run_subset(o, "se", {Estimator::Se}, false);
}

int run_fig1(const Options& o) {
  const Scale scale = o.scale == "paper" ? Scale::Paper : Scale::Desk;
  std::vector<Fig1Side> sides;
  if (o.side == "poisson_matched" || o.side == "both") sides.push_back(Fig1Side::PoissonMatched);
  if (o.side == "gaussian_scaled4" || o.side == "both") sides.push_back(Fig1Side::GaussianScaled4);
  for (Fig1Side s : sides) {
    ExperimentConfig c = fig1_preset(s, scale);
    if (o.seed) c.base_seed = *o.seed;
    if (!o.out.empty()) c.output_dir = (fs::path(o.out) / c.output_dir).string();
    std::cout << "running " << c.output_dir << " (m=" << c.m << ", trials=" << c.trials << ")\n";
    const RunReport rep = run_experiment(c);
    if (rep.failed_trials > 0) std::cerr << "warning: " << rep.failed_trials << " trials failed and were excluded\n";
    write_outputs(c, rep.records, "fig1", o.format);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiked matrix estimation benchmark"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment config");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--format", o.format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
  };
  auto* theory = app.add_subcommand("theory", "mismatched Bayes theory curves");
  auto* amp = app.add_subcommand("amp", "Gaussian AMP trials");
  auto* se = app.add_subcommand("se", "state evolution predictions");
  auto* spectral = app.add_subcommand("spectral", "OptSpec and GauSpec trials");
  auto* experiment = app.add_subcommand("experiment", "everything the config selects");
  auto* fig1 = app.add_subcommand("fig1", "preset reproduction of both panels");
  for (auto* s : {theory, amp, se, spectral, experiment, fig1}) common(s);
  fig1->add_option("--scale", o.scale, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  fig1->add_option("--side", o.side, "poisson_matched, gaussian_scaled4 or both")
      ->check(CLI::IsMember({"poisson_matched", "gaussian_scaled4", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*theory) return run_subset(o, "theory", {Estimator::BayesTheory}, false);
    if (*amp) return run_subset(o, "amp", {Estimator::Amp}, false);
    if (*se) return run_se_rows(o);
    if (*spectral) return run_subset(o, "spectral", {Estimator::OptSpec, Estimator::GauSpec}, true);
    if (*experiment) return run_subset(o, "experiment", {}, false);
    if (*fig1) return run_fig1(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
