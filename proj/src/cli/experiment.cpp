#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "instance.hpp"
#include "otsurf/cli.hpp"
#include "parallel.hpp"

namespace otsurf {

namespace {

using nlohmann::json;
using detail::Instance;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Least-squares slope of log y against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// The seed depends only on the sampling index, so sweeps over other axes share samples.
std::uint64_t point_seed(const ExperimentConfig& c, std::size_t size_index) { return c.seed ^ size_index; }

double stay_constant(const ConvexBody& body, const ConeParams& cone, const DiscreteMeasure& mu) {
  return stay_away_constant(body.dim(), mu.density_min(), cone.conerad_safe, body.diam());
}

json sphere_sanity_row(const ExperimentConfig& c, const ConvexBody& body, const ConeParams& cone, std::size_t idx) {
  const std::size_t count = c.sizes[idx];
  const Instance in = detail::make_instance(body, count, point_seed(c, idx), c.source, c.source, c.solver);
  const auto spread = monge_spread(in.result.plan, in.mu.mass, in.sampling->positions(), c.tau);
  const auto mono = cyclical_monotonicity_check(in.result.plan, in.sampling->positions(), in.sampling->positions(),
                                                1000, point_seed(c, idx));
  json row = {{"anchor", "identical marginals give the identity plan"},
              {"N", count},
              {"W2", in.result.w2},
              {"max_spread", spread.max_spread},
              {"split_mass", spread.split_mass},
              {"gap", in.result.gap},
              {"infeasibility", in.result.dual.infeasibility},
              {"tightness", in.result.dual.tightness},
              {"monotonicity_worst", mono.worst}};
  if (body.dim() >= 2) {
    const auto sa = stay_away_check(*in.sampling, *in.sampling, in.result, stay_constant(body, cone, in.mu));
    row["stay_away_ratio"] = sa.worst_ratio;
  }
  return row;
}

json monge_row(const ExperimentConfig& c, const ConvexBody& body, const ConeParams& cone,
               const ConeParams& strict, const BodyMetrics& metrics, std::size_t idx, double eps) {
  const std::size_t count = c.sizes[idx];
  MeasureConfig target = c.target;
  target.density = "perturbed";
  target.amplitude = eps;
  const Instance in = detail::make_instance(body, count, point_seed(c, idx), c.source, target, c.solver);
  const auto pts = in.sampling->positions();
  const auto spread = monge_spread(in.result.plan, in.mu.mass, pts, c.tau);
  const double spacing = in.sampling->spacing();
  json row = {{"anchor", "small W2 perturbations admit map-like optimal plans"},
              {"N", count},
              {"perturbation", eps},
              {"W2", in.result.w2},
              {"max_spread", spread.max_spread},
              {"spacing", spacing},
              {"spread_over_spacing", spread.max_spread / spacing},
              {"split_fraction", spread.split_fraction},
              {"gap", in.result.gap}};
  if (body.dim() >= 2) {
    const double constant = stay_constant(body, cone, in.mu);
    const auto t = threshold_eval(body.dim(), strict.conerad_safe, constant, metrics.geodesic_constant,
                                  metrics.radial_lipschitz, in.result.w2);
    row["threshold_rhs"] = t.rhs;
    row["w2_threshold"] = t.w2_threshold;
    row["threshold_verdict"] = t.verdict;
    row["stay_away_ratio"] = stay_away_check(*in.sampling, *in.sampling, in.result, constant).worst_ratio;
  }
  try {
    const auto images = plan_map(in.result.plan, in.mu.mass, pts, 3 * spacing);
    const auto fit = holder_fit(pts, images, 0.1 * body.diam());
    row["holder_exponent"] = fit.exponent;
    row["holder_residual"] = fit.residual;
  } catch (const Error& e) {
    row["holder_exponent"] = nullptr;
    row["holder_error"] = error_name(e.code());
  }
  return row;
}

json lens_row(const ExperimentConfig& c, std::size_t idx, double delta, int k) {
  const std::size_t count = c.sizes[idx];
  const auto lens = lens_scenario(2, c.lens_radius, delta, k, count, point_seed(c, idx));
  const auto r = c.solver.solve(lens.mu, lens.mu_bar);
  const auto spread = monge_spread(r.plan, lens.mu.mass, lens.mu_bar.sampling->positions(), c.tau);
  return {{"anchor", "non-smooth lens forces split mass at small W2"},
          {"N", count},
          {"delta", delta},
          {"k", k},
          {"W2", r.w2},
          {"max_spread", spread.max_spread},
          {"split_mass", spread.split_mass},
          {"mass_deficit", lens.deficit},
          {"split_over_deficit", lens.deficit > 0 ? spread.split_mass / lens.deficit : 0.0},
          {"normal_product_max", lens.normal_product_max},
          {"lens_flag", "lens caps centred at -/+(R-1) on the axis"}};
}

json approximation_row(const ExperimentConfig& c, const ConvexBody& body, std::size_t idx, double radius) {
  const std::size_t count = c.sizes[idx];
  const Instance base = detail::make_instance(body, count, point_seed(c, idx), c.source, c.target, c.solver);
  const ConvexBody hull = ball_hull(body, radius);
  const double dh = hausdorff_distance(body, hull).distance;
  // Radial projection onto the hull, and its Lipschitz ratio over all sample pairs.
  const auto pushed_mu = pushforward_radial(base.mu, hull, 1.0);
  const auto from = base.sampling->positions(), to = pushed_mu.measure.sampling->positions();
  double lip = 1.0;
  for (std::size_t a = 0; a < from.size(); ++a)
    for (std::size_t b = a + 1; b < from.size(); ++b) {
      const double d = (from[a] - from[b]).norm();
      if (d > 0) lip = std::max(lip, (to[a] - to[b]).norm() / d);
    }
  const auto pm = pushforward_radial(base.mu, hull, lip);
  const auto pn = pushforward_radial(base.nu, hull, lip);
  const auto r = c.solver.solve(pm.measure, pn.measure);
  double drift = 0;
  for (std::size_t i = 0; i < r.dual.u.size(); ++i) drift = std::max(drift, std::abs(r.dual.u[i] - base.result.dual.u[i]));
  return {{"anchor", "ball-hull approximation keeps W2 within the radial Lipschitz factor"},
          {"N", count},
          {"hull_radius", radius},
          {"hausdorff", dh},
          {"W2", r.w2},
          {"W2_base", base.result.w2},
          {"lipschitz", lip},
          {"w2_bound", 1.05 * lip * base.result.w2},
          {"w2_bound_holds", r.w2 <= 1.05 * lip * base.result.w2},
          {"density_bounds_hold", pm.bounds_hold && pn.bounds_hold},
          {"potential_drift", drift}};
}

void summarize_monge(ExperimentRecord& rec) {
  std::map<double, std::vector<std::pair<std::size_t, double>>> by_eps;
  for (const auto& row : rec.results)
    by_eps[row["perturbation"].get<double>()].emplace_back(row["N"].get<std::size_t>(), row["max_spread"].get<double>());
  json per = json::array();
  for (auto& [eps, v] : by_eps) {
    std::sort(v.begin(), v.end());
    bool mono = true;
    for (std::size_t i = 1; i < v.size(); ++i) mono = mono && v[i].second <= v[i - 1].second;
    per.push_back({{"perturbation", eps}, {"spread_non_increasing_in_N", mono}});
  }
  rec.summary["by_perturbation"] = per;
}

void summarize_lens(ExperimentRecord& rec) {
  std::map<std::pair<std::size_t, double>, std::vector<const json*>> groups;
  for (const auto& row : rec.results) groups[{row["N"].get<std::size_t>(), row["delta"].get<double>()}].push_back(&row);
  json per = json::array();
  for (auto& [key, rows] : groups) {
    std::sort(rows.begin(), rows.end(), [](const json* a, const json* b) { return (*a)["k"] < (*b)["k"]; });
    std::vector<double> ks, w2;
    double min_spread = std::numeric_limits<double>::infinity(), min_split = min_spread;
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ks.push_back((*rows[i])["k"].get<double>());
      w2.push_back((*rows[i])["W2"].get<double>());
      if (i > 0) decreasing = decreasing && w2[i] < w2[i - 1];
      min_spread = std::min(min_spread, (*rows[i])["max_spread"].get<double>());
      min_split = std::min(min_split, (*rows[i])["split_over_deficit"].get<double>());
    }
    per.push_back({{"N", key.first},
                   {"delta", key.second},
                   {"decay_exponent", log_slope(ks, w2)},
                   {"w2_decreasing", decreasing},
                   {"min_max_spread", min_spread},
                   {"min_split_over_deficit", min_split}});
  }
  rec.summary["sweeps"] = per;
}

void summarize_approximation(ExperimentRecord& rec) {
  std::map<std::size_t, std::vector<const json*>> groups;
  for (const auto& row : rec.results) groups[row["N"].get<std::size_t>()].push_back(&row);
  json per = json::array();
  for (auto& [n, rows] : groups) {
    std::sort(rows.begin(), rows.end(),
              [](const json* a, const json* b) { return (*a)["hull_radius"] < (*b)["hull_radius"]; });
    bool hausdorff_decreasing = true;
    json ratios = json::array();
    for (std::size_t i = 1; i < rows.size(); ++i) {
      hausdorff_decreasing = hausdorff_decreasing && (*rows[i])["hausdorff"] < (*rows[i - 1])["hausdorff"];
      const double prev = (*rows[i - 1])["potential_drift"].get<double>();
      ratios.push_back(prev > 0 ? (*rows[i])["potential_drift"].get<double>() / prev : 0.0);
    }
    per.push_back({{"N", n}, {"hausdorff_decreasing", hausdorff_decreasing}, {"drift_ratios", ratios}});
  }
  rec.summary["by_size"] = per;
}

}  // namespace

nlohmann::json geometry_summary(const ConvexBody& body, std::uint64_t seed) {
  const auto m = body_metrics(body, 1500, seed);
  const auto half = conerad(body, 0.5, 10000, seed);
  const auto strict = conerad(body, 35.0 / 36.0, 10000, seed);
  json j = {{"body", body.to_json()},
            {"shape", shape_name(body.shape())},
            {"c1", body.is_c1()},
            {"diam", m.diam},
            {"inradius", m.inradius},
            {"outradius", m.outradius},
            {"geodesic_constant", m.geodesic_constant},
            {"radial_lipschitz", m.radial_lipschitz},
            {"conerad_half", half.conerad},
            {"conerad_half_safe", half.conerad_safe},
            {"conerad_strict", strict.conerad},
            {"conerad_strict_safe", strict.conerad_safe}};
  if (!half.warning.empty()) j["conerad_warning"] = half.warning;
  if (body.dim() >= 2) {
    const auto s = sample_surface(body, 1500, seed);
    const double rho0 = 1.0 / s->total_area();
    j["uniform_density"] = rho0;
    j["stay_away_constant_uniform"] = stay_away_constant(body.dim(), rho0, half.conerad_safe, m.diam);
  }
  return j;
}

ExperimentRecord run_experiment(const ExperimentConfig& config, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.config = config.to_json();
  rec.scenario = config.scenario;
  const std::string& sc = config.scenario;

  try {
    if (sc == "verify_all") {
      const auto reports = verify_battery(config, threads);
      std::size_t passed = 0;
      for (const auto& r : reports) {
        rec.results.push_back(r.to_json());
        passed += r.pass ? 1 : 0;
      }
      rec.summary = {{"checkers", reports.size()}, {"passed", passed}, {"hard_failure", hard_failure(reports)}};
    } else if (sc == "lens_counterexample") {
      struct Point {
        std::size_t idx;
        double delta;
        int k;
      };
      std::vector<Point> grid;
      for (std::size_t i = 0; i < config.sizes.size(); ++i)
        for (double d : config.deltas)
          for (int k : config.ks) grid.push_back({i, d, k});
      std::vector<json> rows(grid.size());
      detail::parallel_for(grid.size(), threads,
                           [&](std::size_t g) { rows[g] = lens_row(config, grid[g].idx, grid[g].delta, grid[g].k); });
      for (auto& r : rows) rec.results.push_back(std::move(r));
      summarize_lens(rec);
    } else {
      const ConvexBody body = config.make_body();
      if (sc == "sphere_sanity") {
        const auto cone = conerad(body, 0.5);
        std::vector<json> rows(config.sizes.size());
        detail::parallel_for(rows.size(), threads, [&](std::size_t i) { rows[i] = sphere_sanity_row(config, body, cone, i); });
        for (auto& r : rows) rec.results.push_back(std::move(r));
      } else if (sc == "monge_regime") {
        const auto cone = conerad(body, 0.5);
        const auto strict = conerad(body, 35.0 / 36.0);
        const auto metrics = body_metrics(body);
        std::vector<std::pair<std::size_t, double>> grid;
        for (std::size_t i = 0; i < config.sizes.size(); ++i)
          for (double eps : config.perturbations) grid.emplace_back(i, eps);
        std::vector<json> rows(grid.size());
        detail::parallel_for(grid.size(), threads, [&](std::size_t g) {
          rows[g] = monge_row(config, body, cone, strict, metrics, grid[g].first, grid[g].second);
        });
        for (auto& r : rows) rec.results.push_back(std::move(r));
        summarize_monge(rec);
      } else if (sc == "approximation_pipeline") {
        std::vector<std::pair<std::size_t, double>> grid;
        for (std::size_t i = 0; i < config.sizes.size(); ++i)
          for (double radius : config.hull_radii) grid.emplace_back(i, radius);
        std::vector<json> rows(grid.size());
        detail::parallel_for(grid.size(), threads, [&](std::size_t g) {
          rows[g] = approximation_row(config, body, grid[g].first, grid[g].second);
        });
        for (auto& r : rows) rec.results.push_back(std::move(r));
        summarize_approximation(rec);
      }
    }
  } catch (const Error& e) {
    throw Error(e.code(), "scenario " + sc + ": " + e.what());
  }
  rec.timing = {{"seconds", seconds_since(t0)}, {"threads", threads}};
  return rec;
}

}  // namespace otsurf
