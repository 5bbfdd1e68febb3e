#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "otsurf/cli.hpp"

namespace {

using nlohmann::json;
using namespace otsurf;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment config (JSON)");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "overrides the config seed");
  sub->add_option("--threads", c.threads, "worker threads (fallback: OTSURF_THREADS)");
}

ExperimentConfig resolve_config(const Common& c, const char* scenario) {
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else {
    cfg = ExperimentConfig::from_json(json{{"scenario", scenario}});
  }
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output = c.out;
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  f << text;
}

std::filesystem::path prepare(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  return dir;
}

int run_geometry(const Common& c) {
  const auto cfg = resolve_config(c, "sphere_sanity");
  const json j = geometry_summary(cfg.make_body(), cfg.seed);
  write_text(prepare(cfg.output) / "geometry.json", dump_json(j) + "\n");
  std::cout << dump_json(j) << "\n";
  return 0;
}

int run_solve(const Common& c) {
  const auto cfg = resolve_config(c, "sphere_sanity");
  const auto body = cfg.make_body();
  const auto sampling = sample_surface(body, cfg.sizes.front(), cfg.seed);
  const auto mu = make_measure(sampling, cfg.source.spec(body.dim()));
  const auto nu = make_measure(sampling, cfg.target.spec(body.dim()));
  const auto r = cfg.solver.solve(mu, nu);
  const auto ys = sampling->positions();
  const auto spread = monge_spread(r.plan, mu.mass, ys, cfg.tau);
  const json j = {{"config", cfg.to_json()},
                  {"version", kVersion},
                  {"N", sampling->size()},
                  {"W2", r.w2},
                  {"primal", r.primal},
                  {"dual", r.dual_value},
                  {"gap", r.gap},
                  {"infeasibility", r.dual.infeasibility},
                  {"support_slack", r.dual.support_slack},
                  {"tightness", r.dual.tightness},
                  {"max_spread", spread.max_spread},
                  {"split_mass", spread.split_mass},
                  {"solver", r.stats.solver},
                  {"iterations", r.stats.iterations},
                  {"unique_optimum", r.stats.unique_optimum}};
  const auto dir = prepare(cfg.output);
  write_plan_csv((dir / "plan.csv").string(), r.plan);
  write_duals_csv((dir / "duals.csv").string(), r.dual.u);
  write_text(dir / "result.json", dump_json(j) + "\n");
  std::printf("W2 %.17g  gap %.3g  max_spread %.6g\n", r.w2, r.gap, spread.max_spread);
  return 0;
}

int run_verify(const Common& c) {
  auto cfg = resolve_config(c, "verify_all");
  cfg.scenario = "verify_all";
  const unsigned threads = resolve_threads(c.threads);
  const auto t0 = std::chrono::steady_clock::now();
  const auto reports = verify_battery(cfg, threads);
  ExperimentRecord rec;
  rec.config = cfg.to_json();
  rec.scenario = cfg.scenario;
  std::size_t passed = 0;
  for (const auto& r : reports) {
    rec.results.push_back(r.to_json());
    passed += r.pass ? 1 : 0;
    std::printf("%-20s %s  worst %.6g\n", r.checker.c_str(), r.pass ? "pass" : "FAIL", r.worst_violation);
  }
  const bool failed = hard_failure(reports);
  rec.summary = {{"checkers", reports.size()}, {"passed", passed}, {"hard_failure", failed}};
  rec.timing = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                {"threads", threads}};
  emit_report(rec, cfg.output);
  return failed ? 1 : 0;
}

int run_experiment_cmd(const Common& c) {
  const auto cfg = resolve_config(c, "sphere_sanity");
  const auto rec = run_experiment(cfg, resolve_threads(c.threads));
  for (const auto& path : emit_report(rec, cfg.output)) std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport on convex boundaries"};
  app.set_version_flag("--version", std::string(otsurf::kVersion));
  app.require_subcommand(1);
  Common common;
  auto* geometry = app.add_subcommand("geometry", "body metrics and cone radii");
  auto* solve = app.add_subcommand("solve", "one transport instance");
  auto* verify = app.add_subcommand("verify", "checker battery; nonzero exit on a hard failure");
  auto* experiment = app.add_subcommand("experiment", "scenario sweep");
  for (auto* sub : {geometry, solve, verify, experiment}) add_common(sub, common);
  CLI11_PARSE(app, argc, argv);
  try {
    if (*geometry) return run_geometry(common);
    if (*solve) return run_solve(common);
    if (*verify) return run_verify(common);
    return run_experiment_cmd(common);
  } catch (const otsurf::Error& e) {
    std::cerr << "otsurf: " << e.what() << "\n";
    return e.code() == otsurf::ErrorCode::ConfigInvalid ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "otsurf: " << e.what() << "\n";
    return 3;
  }
}
