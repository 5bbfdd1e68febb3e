#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "otsurf/measures.hpp"
#include "otsurf/theory.hpp"
#include "otsurf/transport.hpp"

namespace otsurf {

inline constexpr const char* kVersion = "otsurf 0.1.0";

// Density of the form "uniform", "perturbed" (1 + amplitude * sin(2x + y + z)) or "two_sided".
struct MeasureConfig {
  std::string density = "uniform";
  double amplitude = 0.0;
  double upper = 1.0;
  double lower = 1.0;

  DensitySpec spec(int n) const;
  nlohmann::json to_json() const;
  static MeasureConfig from_json(const nlohmann::json& j, const std::string& where);
};

struct SolverConfig {
  std::string solver = "exact";
  EntropicOptions entropic;

  TransportResult solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
  nlohmann::json to_json() const;
  static SolverConfig from_json(const nlohmann::json& j);
};

inline const std::vector<std::string>& checker_names() {
  static const std::vector<std::string> names{
      "c_cone",           "holder_fit",          "local_to_global", "lower_aleksandrov",
      "potential_lipschitz", "qqconv",           "section_convexity", "section_locality",
      "stay_away",        "threshold",           "upper_aleksandrov"};
  return names;
}

// Every key is optional; unknown keys anywhere raise ConfigInvalid.
struct ExperimentConfig {
  std::string scenario = "sphere_sanity";
  nlohmann::json body = {{"shape", "sphere"}, {"n", 2}};
  MeasureConfig source;
  MeasureConfig target;
  std::vector<std::size_t> sizes{500};
  std::uint64_t seed = 1;
  SolverConfig solver;
  std::vector<std::string> checkers = checker_names();
  std::string output = "otsurf_out";
  double tau = kSpreadThreshold;
  // Sweeps.
  std::vector<double> perturbations{0.2, 0.1, 0.05};
  double lens_radius = 5.0;
  std::vector<double> deltas{0.05};
  std::vector<int> ks{1, 2, 4, 8, 16};
  std::vector<double> hull_radii{4, 8, 16, 32};
  std::size_t qqconv_trials = 10000;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  ConvexBody make_body() const { return ConvexBody::from_json(body); }
};

ExperimentConfig load_config(const std::string& path);

// Everything except `timing` is a deterministic function of the config.
struct ExperimentRecord {
  nlohmann::json config = nlohmann::json::object();
  std::string scenario;
  std::string version = kVersion;
  nlohmann::json results = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json timing = nlohmann::json::object();

  nlohmann::json to_json() const;
};

ExperimentRecord run_experiment(const ExperimentConfig& config, unsigned threads);

// One report per enabled checker, sorted by checker name.
std::vector<VerificationReport> verify_battery(const ExperimentConfig& config, unsigned threads);
bool hard_failure(const std::vector<VerificationReport>& reports);

nlohmann::json geometry_summary(const ConvexBody& body, std::uint64_t seed);

// Writes record.json, results.csv and plot_*.csv; returns the written paths.
std::vector<std::string> emit_report(const ExperimentRecord& record, const std::string& dir);

// JSON text with every float written to 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 2);

// Flag value, else OTSURF_THREADS, else hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> flag);

}  // namespace otsurf
