#include <cmath>
#include <cstdlib>
#include <limits>

#include <doctest.h>

#include "otsurf/cli.hpp"

using namespace otsurf;
using nlohmann::json;

TEST_CASE("config rejects unknown keys at every level") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"scenaro", "sphere_sanity"}}), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"source", {{"densty", "uniform"}}}}), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"solver", {{"eps", 1e-3}}}}), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"scenario", "nope"}}), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"checkers", {"qqconv", "bogus"}}}), Error);
}

TEST_CASE("config defaults follow the scenario") {
  const auto lens = ExperimentConfig::from_json(json{{"scenario", "lens_counterexample"}});
  CHECK(lens.sizes == std::vector<std::size_t>{1500});
  CHECK(lens.tau == kSpreadThreshold);
  const auto monge = ExperimentConfig::from_json(json{{"scenario", "monge_regime"}});
  CHECK(monge.make_body().shape() == Shape::Stadium2D);
  CHECK(monge.target.density == "perturbed");
}

TEST_CASE("config round-trips through JSON") {
  const auto a = ExperimentConfig::from_json(json{{"scenario", "monge_regime"}, {"seed", 42}, {"N", {100, 200}}});
  const auto b = ExperimentConfig::from_json(a.to_json());
  CHECK(dump_json(a.to_json()) == dump_json(b.to_json()));
}

TEST_CASE("floats are written with 17 significant digits and non-finite as null") {
  CHECK(dump_json(json(0.1), 0) == "0.10000000000000001");
  CHECK(dump_json(json{{"a", std::numeric_limits<double>::quiet_NaN()}}, 0) == "{\"a\":null}");
  const json j = {{"x", 1.0 / 3}, {"list", {1, 2.5, "s"}}};
  CHECK(json::parse(dump_json(j)).at("x").get<double>() == 1.0 / 3);
  CHECK(dump_json(j) == dump_json(j));
}

TEST_CASE("thread count prefers the flag") {
  CHECK(resolve_threads(3u) == 3);
  CHECK(resolve_threads(std::nullopt) >= 1);
}

TEST_CASE("experiment records are deterministic apart from timing") {
  const auto cfg = ExperimentConfig::from_json(json{{"scenario", "sphere_sanity"}, {"N", {64, 128}}, {"seed", 7}});
  auto a = run_experiment(cfg, 1).to_json();
  auto b = run_experiment(cfg, 4).to_json();
  a.erase("timing");
  b.erase("timing");
  CHECK(dump_json(a) == dump_json(b));
  CHECK(a.at("results").size() == 2);
}

TEST_CASE("verify battery runs each checker once and in name order") {
  const auto cfg = ExperimentConfig::from_json(json{{"scenario", "verify_all"}, {"qqconv_trials", 200}});
  const auto reports = verify_battery(cfg, 2);
  REQUIRE(reports.size() == checker_names().size());
  for (std::size_t k = 0; k < reports.size(); ++k) {
    CHECK(reports[k].checker == checker_names()[k]);
    CHECK_FALSE(reports[k].anchor.empty());
  }
  CHECK_FALSE(hard_failure(reports));
}

TEST_CASE("an empty record is valid JSON with an empty results array") {
  ExperimentRecord rec;
  const auto j = json::parse(dump_json(rec.to_json()));
  CHECK(j.at("results").is_array());
  CHECK(j.at("results").empty());
}
