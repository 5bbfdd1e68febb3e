#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "otsurf/cli.hpp"

namespace otsurf {

namespace {

using nlohmann::json;

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw Error(ErrorCode::ConfigInvalid, "unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
T get(const json& j, const char* key, const T& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigInvalid, std::string("bad value for '") + key + "' in " + where);
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::ConfigInvalid, msg);
}

}  // namespace

DensitySpec MeasureConfig::spec(int n) const {
  if (density == "uniform") return DensitySpec::uniform();
  if (density == "two_sided") return DensitySpec::two_sided(upper, lower, lens_axis(n));
  const double a = amplitude;
  return DensitySpec::custom([a](const SurfacePoint& p) { return 1.0 + a * std::sin(2 * p.x[0] + p.x[1] + p.x[2]); });
}

json MeasureConfig::to_json() const {
  json j = {{"density", density}};
  if (density == "perturbed") j["amplitude"] = amplitude;
  if (density == "two_sided") j["upper"] = upper, j["lower"] = lower;
  return j;
}

MeasureConfig MeasureConfig::from_json(const json& j, const std::string& where) {
  allow_keys(j, where, {"density", "amplitude", "upper", "lower"});
  MeasureConfig m;
  m.density = get<std::string>(j, "density", m.density, where);
  m.amplitude = get<double>(j, "amplitude", m.amplitude, where);
  m.upper = get<double>(j, "upper", m.upper, where);
  m.lower = get<double>(j, "lower", m.lower, where);
  require(m.density == "uniform" || m.density == "perturbed" || m.density == "two_sided",
          where + ".density must be uniform, perturbed or two_sided");
  require(std::abs(m.amplitude) < 1, where + ".amplitude must lie in (-1, 1)");
  require(m.upper > 0 && m.lower > 0, where + " densities must be positive");
  return m;
}

TransportResult SolverConfig::solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  return solver == "exact" ? solve_exact(mu, nu) : solve_entropic(mu, nu, entropic);
}

json SolverConfig::to_json() const {
  return {{"solver", solver},
          {"epsilon", entropic.epsilon},
          {"max_iters", entropic.max_iters},
          {"tolerance", entropic.tolerance}};
}

SolverConfig SolverConfig::from_json(const json& j) {
  allow_keys(j, "solver", {"solver", "epsilon", "max_iters", "tolerance"});
  SolverConfig s;
  s.solver = get<std::string>(j, "solver", s.solver, "solver");
  s.entropic.epsilon = get<double>(j, "epsilon", s.entropic.epsilon, "solver");
  s.entropic.max_iters = get<std::size_t>(j, "max_iters", s.entropic.max_iters, "solver");
  s.entropic.tolerance = get<double>(j, "tolerance", s.entropic.tolerance, "solver");
  require(s.solver == "exact" || s.solver == "entropic", "solver.solver must be exact or entropic");
  require(s.entropic.epsilon > 0 && s.entropic.tolerance > 0 && s.entropic.max_iters > 0,
          "solver tolerances must be positive");
  return s;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  allow_keys(j, "config",
             {"scenario", "body", "source", "target", "N", "seed", "solver", "checkers", "output", "tau",
              "perturbations", "lens_R", "deltas", "k", "hull_radii", "qqconv_trials"});
  ExperimentConfig c;
  c.scenario = get<std::string>(j, "scenario", c.scenario, "config");
  static const std::set<std::string> scenarios{"sphere_sanity", "monge_regime", "lens_counterexample",
                                               "approximation_pipeline", "verify_all"};
  require(scenarios.count(c.scenario) == 1, "unknown scenario '" + c.scenario + "'");
  if (c.scenario == "monge_regime" || c.scenario == "approximation_pipeline")
    c.body = {{"shape", "stadium2d"}, {"half_length", 1.0}, {"cap_radius", 0.5}};
  if (c.scenario != "sphere_sanity" && c.scenario != "lens_counterexample")
    c.target = MeasureConfig{"perturbed", 0.1, 1.0, 1.0};
  if (c.scenario == "lens_counterexample") c.sizes = {1500};
  if (j.contains("body")) c.body = j.at("body");
  try {
    (void)ConvexBody::from_json(c.body);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("body: ") + e.what());
  }
  if (j.contains("source")) c.source = MeasureConfig::from_json(j.at("source"), "source");
  if (j.contains("target")) c.target = MeasureConfig::from_json(j.at("target"), "target");
  c.sizes = get(j, "N", c.sizes, "config");
  c.seed = get(j, "seed", c.seed, "config");
  if (j.contains("solver")) c.solver = SolverConfig::from_json(j.at("solver"));
  c.checkers = get(j, "checkers", c.checkers, "config");
  c.output = get(j, "output", c.output, "config");
  c.tau = get(j, "tau", c.tau, "config");
  c.perturbations = get(j, "perturbations", c.perturbations, "config");
  c.lens_radius = get(j, "lens_R", c.lens_radius, "config");
  c.deltas = get(j, "deltas", c.deltas, "config");
  c.ks = get(j, "k", c.ks, "config");
  c.hull_radii = get(j, "hull_radii", c.hull_radii, "config");
  c.qqconv_trials = get(j, "qqconv_trials", c.qqconv_trials, "config");

  require(!c.sizes.empty(), "N must list at least one size");
  for (auto n : c.sizes) require(n >= 16, "every N must be at least 16");
  for (const auto& name : c.checkers)
    require(std::count(checker_names().begin(), checker_names().end(), name) == 1, "unknown checker '" + name + "'");
  require(c.tau >= 0 && c.tau < 1, "tau must lie in [0, 1)");
  for (double p : c.perturbations) require(std::abs(p) < 1, "perturbations must lie in (-1, 1)");
  for (double d : c.deltas) require(d > 0, "deltas must be positive");
  for (int k : c.ks) require(k >= 1, "k values must be at least 1");
  for (double r : c.hull_radii) require(r > 0, "hull radii must be positive");
  require(c.lens_radius > 2, "lens_R must exceed 2");
  require(c.qqconv_trials >= 1, "qqconv_trials must be positive");
  return c;
}

json ExperimentConfig::to_json() const {
  return {{"scenario", scenario},
          {"body", body},
          {"source", source.to_json()},
          {"target", target.to_json()},
          {"N", sizes},
          {"seed", seed},
          {"solver", solver.to_json()},
          {"checkers", checkers},
          {"output", output},
          {"tau", tau},
          {"perturbations", perturbations},
          {"lens_R", lens_radius},
          {"deltas", deltas},
          {"k", ks},
          {"hull_radii", hull_radii},
          {"qqconv_trials", qqconv_trials}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("OTSURF_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace otsurf
