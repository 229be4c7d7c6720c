#include "spikebench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spikebench/error.hpp"

namespace spikebench {

namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

SingularLaw parse_law(const json& j, double alpha) {
  const auto kind = get<std::string>(j, "kind", "noise.law");
  try {
    if (kind == "gaussian") {
      only_keys(j, {"kind"}, "noise.law");
      return SingularLaw::gaussian(alpha);
    }
    if (kind == "rect_poisson") {
      only_keys(j, {"kind", "c"}, "noise.law");
      double c = 1.0;
      maybe(j, "c", c, "noise.law");
      return SingularLaw::rect_poisson(alpha, c);
    }
    if (kind == "atomic") {
      only_keys(j, {"kind", "atoms", "weights"}, "noise.law");
      return SingularLaw::atomic(alpha, get<std::vector<double>>(j, "atoms", "noise.law"),
                                 get<std::vector<double>>(j, "weights", "noise.law"));
    }
    if (kind == "empirical") {
      only_keys(j, {"kind", "samples"}, "noise.law");
      return SingularLaw::empirical(alpha, get<std::vector<double>>(j, "samples", "noise.law"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("noise.law: ") + e.what());
  }
  throw ConfigError("unknown law kind '" + kind + "'");
}

NoiseSpec parse_noise(const json& j, double alpha) {
  const auto kind = get<std::string>(j, "kind", "noise");
  if (kind == "gaussian") {
    only_keys(j, {"kind"}, "noise");
    return GaussianNoise{};
  }
  if (kind == "rect_poisson") {
    only_keys(j, {"kind", "c"}, "noise");
    RectPoissonNoise p;
    maybe(j, "c", p.c, "noise");
    if (!(p.c > 0)) throw ConfigError("noise.c must be positive");
    return p;
  }
  if (kind == "from_law") {
    only_keys(j, {"kind", "law"}, "noise");
    if (!j.contains("law")) throw ConfigError("noise.law is required for from_law");
    return FromLawNoise{parse_law(j.at("law"), alpha)};
  }
  throw ConfigError("unknown noise kind '" + kind + "'");
}

json law_json(const SingularLaw& law) {
  if (auto* a = std::get_if<AtomicLaw>(&law.kind()))
    return {{"kind", "atomic"}, {"atoms", a->atoms}, {"weights", a->weights}};
  if (auto* e = std::get_if<EmpiricalLaw>(&law.kind())) return {{"kind", "empirical"}, {"samples", e->samples}};
  if (law.is_gaussian()) return {{"kind", "gaussian"}};
  return {{"kind", "rect_poisson"}, {"c", std::get<RectPoissonLaw>(law.kind()).c}};
}

json noise_json(const NoiseSpec& spec) {
  if (std::holds_alternative<GaussianNoise>(spec)) return {{"kind", "gaussian"}};
  if (auto* p = std::get_if<RectPoissonNoise>(&spec)) return {{"kind", "rect_poisson"}, {"c", p->c}};
  return {{"kind", "from_law"}, {"law", law_json(std::get<FromLawNoise>(spec).law)}};
}

MismatchRule parse_rule(const json& j) {
  const auto rule = get<std::string>(j, "rule", "mismatch");
  if (rule == "matched") {
    only_keys(j, {"rule"}, "mismatch");
    return Matched{};
  }
  if (rule == "scaled") {
    only_keys(j, {"rule", "factor"}, "mismatch");
    return Scaled{get<double>(j, "factor", "mismatch")};
  }
  if (rule == "fixed") {
    only_keys(j, {"rule", "lambda"}, "mismatch");
    return Fixed{get<double>(j, "lambda", "mismatch")};
  }
  throw ConfigError("unknown mismatch rule '" + rule + "'");
}

json rule_json(const MismatchRule& r) {
  if (std::holds_alternative<Matched>(r)) return {{"rule", "matched"}};
  if (auto* s = std::get_if<Scaled>(&r)) return {{"rule", "scaled"}, {"factor", s->factor}};
  return {{"rule", "fixed"}, {"lambda", std::get<Fixed>(r).lambda}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  only_keys(j,
            {"schema_version", "noise", "aspect", "m", "n", "spectral_m", "lambda_star_grid", "mismatch", "estimators",
             "trials", "spectral_trials", "base_seed", "amp", "mc", "output_dir", "emit_trials"},
            "config");
  if (!j.contains("schema_version")) throw ConfigError("missing schema_version");
  if (get<int>(j, "schema_version", "config") != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")");

  ExperimentConfig c;
  maybe(j, "aspect", c.aspect, "config");
  if (j.contains("noise")) c.noise = parse_noise(j.at("noise"), c.aspect);
  std::int64_t m = c.m, n = 0, sm = 0;
  maybe(j, "m", m, "config");
  maybe(j, "n", n, "config");
  maybe(j, "spectral_m", sm, "config");
  c.m = m;
  c.n = n;
  c.spectral_m = sm;
  maybe(j, "lambda_star_grid", c.lambda_star_grid, "config");
  if (j.contains("mismatch")) c.rule = parse_rule(j.at("mismatch"));
  if (j.contains("estimators")) {
    c.estimators.clear();
    for (const auto& name : get<std::vector<std::string>>(j, "estimators", "config"))
      c.estimators.push_back(parse_estimator(name));
  }
  maybe(j, "trials", c.trials, "config");
  maybe(j, "spectral_trials", c.spectral_trials, "config");
  maybe(j, "base_seed", c.base_seed, "config");
  maybe(j, "output_dir", c.output_dir, "config");
  maybe(j, "emit_trials", c.emit_trials, "config");
  if (j.contains("amp")) {
    const json& a = j.at("amp");
    only_keys(a, {"t_max", "init_corr", "early_stop_tol", "denoiser"}, "amp");
    maybe(a, "t_max", c.amp.t_max, "amp");
    maybe(a, "init_corr", c.amp.init_corr, "amp");
    maybe(a, "early_stop_tol", c.amp.early_stop_tol, "amp");
    if (a.contains("denoiser")) {
      const auto d = get<std::string>(a, "denoiser", "amp");
      if (d == "linear")
        c.amp.denoiser.kind = DenoiserKind::LinearAssumedModel;
      else if (d == "sphere")
        c.amp.denoiser.kind = DenoiserKind::SphereProjection;
      else
        throw ConfigError("unknown denoiser '" + d + "'");
    }
  }
  if (j.contains("mc")) {
    const json& mc = j.at("mc");
    only_keys(mc, {"samples", "seed"}, "mc");
    maybe(mc, "samples", c.mc.samples, "mc");
    maybe(mc, "seed", c.mc.seed, "mc");
  }
  if (c.estimators.empty()) c.estimators = {Estimator::BayesTheory};
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["noise"] = noise_json(c.noise);
  j["aspect"] = c.aspect;
  j["m"] = c.m;
  j["n"] = c.rows();
  if (c.spectral_m > 0) j["spectral_m"] = c.spectral_m;
  j["lambda_star_grid"] = c.lambda_star_grid;
  j["mismatch"] = rule_json(c.rule);
  std::vector<std::string> est;
  for (Estimator e : c.estimators) est.push_back(estimator_name(e));
  j["estimators"] = est;
  j["trials"] = c.trials;
  if (c.spectral_trials > 0) j["spectral_trials"] = c.spectral_trials;
  j["base_seed"] = c.base_seed;
  j["amp"] = {{"t_max", c.amp.t_max},
              {"init_corr", c.amp.init_corr},
              {"early_stop_tol", c.amp.early_stop_tol},
              {"denoiser", c.amp.denoiser.kind == DenoiserKind::SphereProjection ? "sphere" : "linear"}};
  j["mc"] = {{"samples", c.mc.samples}, {"seed", c.mc.seed}};
  j["output_dir"] = c.output_dir;
  j["emit_trials"] = c.emit_trials;
  return j.dump(2) + "\n";
}

}  // namespace spikebench
