#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "spikebench/bayes_theory.hpp"
#include "spikebench/config.hpp"
#include "spikebench/error.hpp"
#include "spikebench/harness.hpp"
#include "spikebench/records.hpp"
#include "spikebench/spectral.hpp"

using namespace spikebench;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.noise = RectPoissonNoise{1.0};
  c.m = 200;
  c.lambda_star_grid = {1.0, 4.0};
  c.estimators = {Estimator::BayesTheory, Estimator::Amp, Estimator::Se, Estimator::OptSpec, Estimator::GauSpec};
  c.trials = 3;
  c.amp.t_max = 4;
  c.mc.samples = 10000;
  c.base_seed = 17;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spikebench_test_" + name);
  fs::remove_all(p);
  return p;
}

int count_polylines(const boost::property_tree::ptree& t) {
  int k = 0;
  for (const auto& [name, child] : t) k += (name == "polyline") + count_polylines(child);
  return k;
}

const ResultRecord& find(const std::vector<ResultRecord>& recs, const std::string& est, const std::string& metric,
                         double ls) {
  for (const auto& r : recs)
    if (r.estimator == est && r.metric == metric && r.lambda_star == ls) return r;
  throw std::runtime_error("record not found: " + est);
}

struct ThreadEnv {
  explicit ThreadEnv(const char* v) { setenv("SPIKEBENCH_THREADS", v, 1); }
  ~ThreadEnv() { unsetenv("SPIKEBENCH_THREADS"); }
};

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("mismatch rules") {
    CHECK(assumed_lambda(Matched{}, 2.5) == 2.5);
    CHECK(assumed_lambda(Scaled{4.0}, 2.5) == 10.0);
    CHECK(assumed_lambda(Fixed{3.0}, 2.5) == 3.0);
    for (Estimator e : {Estimator::BayesTheory, Estimator::Amp, Estimator::Se, Estimator::OptSpec, Estimator::GauSpec})
      CHECK(parse_estimator(estimator_name(e)) == e);
    CHECK_THROWS_AS(parse_estimator("power"), ConfigError);
  }

  TEST_CASE("config validation") {
    ExperimentConfig c = small_config();
    CHECK_NOTHROW(validate(c));
    c.trials = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.lambda_star_grid.clear();
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.n = 150;  // alpha = 0.75 against aspect 0.6
    CHECK_THROWS_AS(validate(c), ConfigError);
    CHECK(small_config().rows() == 120);
  }

  TEST_CASE("JSON config") {
    const ExperimentConfig c = small_config();
    const ExperimentConfig back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.m == 200);
    CHECK(std::holds_alternative<RectPoissonNoise>(back.noise));

    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "lambda_star_grid": [1], "bogus": 3})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 2, "lambda_star_grid": [1]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"lambda_star_grid": [1]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "lambda_star_grid": [1], "amp": {"t": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "lambda_star_grid": [1],
                                     "noise": {"kind": "from_law", "law": {"kind": "atomic", "atoms": [1], "weights": [0.5]}}})"),
                    ConfigError);

    const auto s = parse_config(R"({"schema_version": 1, "lambda_star_grid": [2, 3],
                                    "mismatch": {"rule": "scaled", "factor": 4}, "estimators": ["se", "optspec"],
                                    "noise": {"kind": "from_law", "law": {"kind": "atomic", "atoms": [1], "weights": [1]}}})");
    CHECK(std::get<Scaled>(s.rule).factor == 4.0);
    CHECK(s.has(Estimator::OptSpec));
    CHECK_FALSE(s.has(Estimator::Amp));
  }

  TEST_CASE("CSV round trip") {
    std::vector<ResultRecord> recs = {
        {"amp", 0.5, 2.0, "mse", 0.1234567890123456789, 1e-17, 1200, 2000, 20, 18446744073709551615ull},
        {"bayes_theory", 1.0 / 3.0, 4.0 / 3.0, "overlap", std::nextafter(1.0, 0.0), 0.0, 6000, 10000, 0, 0},
        {"se", 8.0, 8.0, "mse", -0.0, 0.0, 1, 2, 0, 42}};
    const std::string csv = records_to_csv(recs);
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(parse_csv(csv) == recs);
    CHECK_THROWS_AS(parse_csv("estimator,value\n"), IoError);

    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    const fs::path p = dir / "r.csv";
    emit_csv(recs, p.string());
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == csv);

    const fs::path none = dir / "empty.csv";
    CHECK_THROWS_AS(emit_csv({}, none.string()), IoError);
    CHECK_FALSE(fs::exists(none));
    CHECK_THROWS_AS(emit_svg({}, (dir / "empty.svg").string()), IoError);
    CHECK_FALSE(fs::exists(dir / "empty.svg"));
    CHECK_THROWS_AS(emit_csv(recs, (dir / "missing" / "r.csv").string()), IoError);
    fs::remove_all(dir);
  }

  TEST_CASE("SVG structure") {
    std::vector<ResultRecord> recs;
    for (const char* est : {"amp", "se", "optspec"})
      for (const char* metric : {"mse", "overlap"})
        for (double ls : {1.0, 2.0, 3.0}) recs.push_back({est, ls, ls, metric, 0.1 * ls, 0.01, 60, 100, 5, 1});
    recs.push_back({"amp_trial", 1.0, 1.0, "mse", 0.3, 0.0, 60, 100, 1, 9});
    recs.push_back({"a<b&c", 1.0, 1.0, "mse", 0.3, 0.0, 60, 100, 1, 9});
    std::istringstream in(records_to_svg(recs));
    boost::property_tree::ptree tree;
    REQUIRE_NOTHROW(boost::property_tree::read_xml(in, tree));
    REQUIRE(tree.count("svg") == 1);
    // 4 series in the mse panel, 3 in the overlap panel; per-trial rows are not plotted
    CHECK(count_polylines(tree.get_child("svg")) == 7);
  }

  TEST_CASE("experiment records") {
    const ExperimentConfig c = small_config();
    const RunReport rep = run_experiment(c);
    CHECK(rep.failed_trials == 0);
    std::set<std::string> seen;
    for (const auto& r : rep.records) {
      seen.insert(r.estimator);
      CHECK(r.lambda == r.lambda_star);  // matched rule
      CHECK(r.stderr_ >= 0);
      CHECK(r.m == (r.estimator.find("spec") != std::string::npos ? c.spectral_cols() : c.m));
      if (r.estimator.ends_with("_theory") || r.estimator == "se") {
        CHECK(r.stderr_ == 0.0);
        CHECK(r.trials == 0);
      }
      if (r.estimator == "amp") CHECK(r.trials == 3);
      if (r.metric == "overlap") {
        CHECK(r.value >= 0);
        CHECK(r.value <= 1 + 1e-12);
      }
    }
    CHECK(seen == std::set<std::string>{"bayes_theory", "amp", "se", "optspec", "gauspec", "optspec_theory",
                                        "gauspec_theory"});
    // 5 estimators with 2 metrics plus 3 spectral theory rows, at 2 grid points
    CHECK(rep.records.size() == 26);
    CHECK(find(rep.records, "optspec_theory", "overlap", 4.0).value ==
          j_scaling(SingularLaw::rect_poisson(0.6, 1.0), 4.0));
    const double th = find(rep.records, "bayes_theory", "mse", 4.0).value;
    CHECK(th == theory_point(SingularLaw::rect_poisson(0.6, 1.0), 4.0, 4.0).mse);

    ExperimentConfig s = c;
    s.rule = Scaled{4.0};
    s.estimators = {Estimator::BayesTheory};
    for (const auto& r : run_experiment(s).records) CHECK(r.lambda == 4 * r.lambda_star);

    ExperimentConfig t = c;
    t.emit_trials = true;
    t.estimators = {Estimator::Amp};
    int trial_rows = 0;
    for (const auto& r : run_experiment(t).records) trial_rows += r.estimator == "amp_trial";
    CHECK(trial_rows == 2 * 2 * 3);

    // per-iteration AMP rows: grid x trials x t_max, final iterate matches the trial row
    const RunReport h = run_experiment(t);
    REQUIRE(h.amp_iterations.size() == 2 * 3 * 4);
    CHECK(h.amp_iterations[3].t == 4);
    CHECK(h.amp_iterations[3].trial == 0);
    const auto& last = h.amp_iterations[3];
    for (const auto& r : h.records)
      if (r.estimator == "amp_trial" && r.metric == "overlap" && r.seed == last.seed) CHECK(r.value == last.overlap);
  }

  TEST_CASE("determinism across worker counts") {
    ExperimentConfig c = small_config();
    c.trials = 4;
    std::string one, three;
    {
      ThreadEnv env("1");
      one = records_to_csv(run_experiment(c).records);
    }
    {
      ThreadEnv env("3");
      three = records_to_csv(run_experiment(c).records);
    }
    CHECK(one == three);
    c.base_seed = 18;
    CHECK(records_to_csv(run_experiment(c).records) != one);
  }

  TEST_CASE("SE iteration rows") {
    ExperimentConfig c = small_config();
    const auto rows = se_iterations(c);
    CHECK(rows.size() == 2 * 4);
    CHECK(rows.front().t == 1);
    CHECK(rows.back().t == 4);
  }

  TEST_CASE("fig1 presets") {
    const ExperimentConfig p = fig1_preset(Fig1Side::PoissonMatched, Scale::Paper);
    CHECK(p.m == 20000);
    CHECK(p.spectral_cols() == 10000);
    CHECK(p.trials == 100);
    CHECK(p.spectral_trial_count() == 20);
    CHECK(p.aspect == 0.6);
    CHECK(p.rows() == 12000);
    CHECK(std::holds_alternative<Matched>(p.rule));
    CHECK(std::holds_alternative<RectPoissonNoise>(p.noise));

    const ExperimentConfig g = fig1_preset(Fig1Side::GaussianScaled4, Scale::Paper);
    REQUIRE(std::holds_alternative<Scaled>(g.rule));
    CHECK(std::get<Scaled>(g.rule).factor == 4.0);
    CHECK(std::holds_alternative<GaussianNoise>(g.noise));

    const ExperimentConfig d = fig1_preset(Fig1Side::GaussianScaled4, Scale::Desk);
    CHECK(d.m == 2000);
    CHECK(d.trials == 20);
    CHECK(d.spectral_trial_count() == 20);
    CHECK(d.aspect == 0.6);
    const auto grid = fig1_grid();
    REQUIRE(grid.size() == 16);
    CHECK(grid.front() == 0.5);
    CHECK(grid.back() == 8.0);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] - grid[i - 1] == 0.5);
    CHECK_NOTHROW(validate(p));
    CHECK_NOTHROW(validate(d));
  }

  TEST_CASE("Gaussian matched consistency at large SNR") {
    ExperimentConfig c = fig1_preset(Fig1Side::PoissonMatched, Scale::Desk);
    c.noise = GaussianNoise{};
    c.lambda_star_grid = {8.0};
    c.estimators = {Estimator::BayesTheory, Estimator::Amp, Estimator::OptSpec};
    c.trials = 5;
    const auto recs = run_experiment(c).records;
    const double bayes = find(recs, "bayes_theory", "overlap", 8.0).value;
    CHECK(std::abs(find(recs, "amp", "overlap", 8.0).value - bayes) <= 0.03);
    CHECK(std::abs(find(recs, "optspec", "overlap", 8.0).value - std::sqrt(oracle::gauss_spectral_sq(8.0, 0.6))) <=
          0.03);
  }
}
