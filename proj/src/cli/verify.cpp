#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "instance.hpp"
#include "otsurf/cli.hpp"
#include "parallel.hpp"

namespace otsurf {

namespace {

using nlohmann::json;
using detail::Instance;

// Quantities shared by several checkers, computed once per battery.
struct Context {
  Context(ExperimentConfig cfg, ConvexBody b) : config(std::move(cfg)), body(std::move(b)) {}
  ExperimentConfig config;
  ConvexBody body;
  int n = 2;
  double diam = 0;
  Vec x0 = Vec::Zero();
  ConeParams cone_half;
  ConeParams cone_strict;
  BodyMetrics metrics;
  Instance instance;
  SyntheticPotential shift;
  std::vector<double> shift_values;
};

std::size_t base_size(const Context& c) { return c.config.sizes.front(); }

VerificationReport start(const Context& c, const char* checker, const char* anchor) {
  VerificationReport r;
  r.checker = checker;
  r.anchor = anchor;
  r.config = {{"body", c.config.body}, {"N", base_size(c)}, {"seed", c.config.seed}};
  return r;
}

// Sample closest to x0 and the section data of the shift potential there.
struct ShiftSection {
  int index = 0;
  Vec x0;
  Vec slope;
  double u0 = 0;
  SectionSpec spec;
};

ShiftSection shift_section(const Context& c, double h) {
  const auto& pts = c.instance.sampling->points;
  ShiftSection s;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i].x - c.x0).norm();
    if (d < best && !pts[i].non_unique) best = d, s.index = static_cast<int>(i);
  }
  s.x0 = pts[s.index].x;
  s.u0 = c.shift_values[s.index];
  s.slope = c.shift.slopes[c.shift.argmax(s.x0)];
  s.spec = SectionSpec::through(s.x0, s.u0, s.slope, h);
  return s;
}

std::vector<Tan> crease_tangents(int n, double rho) {
  if (n == 1) return {Tan(rho, 0), Tan(-rho, 0)};
  std::vector<Tan> t;
  for (int k = 0; k < 3; ++k) {
    const double a = 2 * std::numbers::pi * k / 3;
    t.emplace_back(rho * std::cos(a), rho * std::sin(a));
  }
  return t;
}

std::vector<Tan> test_directions(int n) {
  if (n == 1) return {Tan(1, 0), Tan(-1, 0)};
  std::vector<Tan> d;
  for (int k = 0; k < 8; ++k) d.emplace_back(std::cos(k * std::numbers::pi / 4), std::sin(k * std::numbers::pi / 4));
  return d;
}

void skip_low_dimension(VerificationReport& r) {
  r.details = {{"skipped", "constant formula is stated for n >= 2"}};
  r.worst_violation = 0;
  r.settle();
}

double stay_away_const(const Context& c) {
  return stay_away_constant(c.n, c.instance.mu.density_min(), c.cone_half.conerad_safe, c.diam);
}

VerificationReport check_qqconv(const Context& c) {
  VerificationReport r = qqconv_battery(c.body, c.config.qqconv_trials, 33, c.config.seed);
  r.config = {{"body", c.config.body}, {"trials", c.config.qqconv_trials}, {"seed", c.config.seed}};
  return r;
}

VerificationReport check_section_convexity(const Context& c) {
  auto r = start(c, "section_convexity", "projected sections of c-convex potentials are convex");
  const auto s = shift_section(c, 0.02 * c.diam * c.diam);
  const Section sec = section_extract(*c.instance.sampling, c.shift_values, s.spec);
  r.samples = sec.members.size();
  r.worst_violation = sec.convexity_defect - 2 * sec.spacing;
  r.details = {{"convexity_defect", sec.convexity_defect},
               {"spacing", sec.spacing},
               {"crosses_side", sec.crosses_side},
               {"members", sec.members.size()}};
  r.settle();
  return r;
}

VerificationReport check_section_locality(const Context& c) {
  auto r = start(c, "section_locality", "small sections stay near their slope point");
  const double h = 0.005 * c.diam * c.diam;
  const double eta = 0.15 * c.diam;
  const auto s = shift_section(c, h);
  const auto loc = section_locality_check(*c.instance.sampling, c.shift_values, s.x0, s.u0, s.slope, h, eta);
  r.samples = c.instance.sampling->size();
  r.worst_violation = loc.pass ? std::min(0.0, h - loc.h_star) : h - loc.h_star;
  r.details = {{"h", h}, {"eta", eta}, {"h_star", loc.h_star}, {"heights_scanned", loc.heights_scanned}};
  r.settle();
  return r;
}

VerificationReport check_lower_aleksandrov(const Context& c) {
  auto r = start(c, "lower_aleksandrov", "section height bounds area times subdifferential area from below");
  const double patch = 0.3 * c.cone_half.conerad_safe;
  auto sampling = patch_sampling(c.body, c.x0, patch, 2000);
  auto pot = SyntheticPotential::shift(sampling->positions(), Vec::UnitX(), 0.15 * patch);
  PotentialOnSamples ps{sampling, pot.evaluate(sampling->positions()), sampling};
  const Vec slope = pot.slopes[pot.argmax(c.x0)];
  const double radius = 0.4 * patch;
  const auto spec = SectionSpec::through(c.x0, pot(c.x0), slope, 0.5 * radius * radius);
  const double theta = 35.0 / 36.0;
  const auto la = lower_aleksandrov_check(ps, spec, theta, c.cone_half.conerad_safe);
  r.samples = sampling->size();
  r.worst_violation = -la.margin - kAreaSlack * la.rhs;
  r.details = {{"lhs", la.lhs},           {"rhs", la.rhs},           {"margin", la.margin},
               {"area_a", la.area_a},     {"area_image", la.area_image}, {"section_size", la.section_size},
               {"a_size", la.a_size},     {"theta", theta},          {"slack", kAreaSlack}};
  r.settle();
  return r;
}

VerificationReport check_upper_aleksandrov(const Context& c) {
  auto r = start(c, "upper_aleksandrov", "section height bounds area times subdifferential area from above");
  const double rho = 0.1 * c.cone_strict.conerad_safe;
  const auto pot = SyntheticPotential::crease(c.body, c.x0, crease_tangents(c.n, rho));
  const double h = 0.5 * rho * rho;
  const auto spec = SectionSpec::through(c.x0, pot(c.x0), c.x0, h);
  json per = json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (std::size_t count : {500, 1000, 2000}) {
    auto sampling = patch_sampling(c.body, c.x0, 1.4 * rho, count);
    const auto ua = upper_aleksandrov_check(c.body, pot, *sampling, spec, c.x0, test_directions(c.n),
                                            c.cone_strict.conerad_safe / 8);
    double worst = 0;
    for (const auto& [w, v] : ua.by_direction) worst = std::max(worst, v);
    lo = std::min(lo, worst);
    hi = std::max(hi, worst);
    per.push_back({{"N", count}, {"implied_constant", worst}, {"area_section", ua.area_section},
                   {"area_subdifferential", ua.area_subdiff}});
    r.samples += sampling->size();
    r.implied_constant = worst;
  }
  r.worst_violation = hi / lo - 2.0;
  r.details = {{"refinements", per}, {"crease_radius", rho}, {"height", h}};
  r.settle();
  return r;
}

VerificationReport check_c_cone(const Context& c) {
  auto r = start(c, "c_cone", "c-cone lies below the section level and touches the vertex");
  const auto s = shift_section(c, 0.02 * c.diam * c.diam);
  const auto& sampling = *c.instance.sampling;
  const Section sec = section_extract(sampling, c.shift_values, s.spec);
  std::vector<int> order(sampling.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min<std::size_t>(200, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep), order.end(), [&](int a, int b) {
    return (sampling.points[a].x - s.slope).norm() < (sampling.points[b].x - s.slope).norm();
  });
  std::vector<Vec> candidates;
  for (std::size_t k = 0; k < keep; ++k) candidates.push_back(sampling.points[order[k]].x);
  const auto cone = c_cone_eval(sampling, sec.members, s.x0, s.u0, s.spec, candidates);
  r.samples = candidates.size();
  r.tolerance = 1e-12 * std::max(1.0, c.diam * c.diam);
  r.worst_violation = std::max(cone.worst_excess_on_section, cone.vertex_gap);
  r.details = {{"admissible", cone.admissible.size()}, {"worst_excess_on_section", cone.worst_excess_on_section},
               {"vertex_gap", cone.vertex_gap}};
  r.settle();
  return r;
}

VerificationReport check_stay_away(const Context& c) {
  auto r = start(c, "stay_away", "same-side support pairs stay within C W2^(2/(n+2))");
  r.tolerance = 1.0;
  if (c.n < 2) {
    skip_low_dimension(r);
    return r;
  }
  const double constant = stay_away_const(c);
  const auto sa = stay_away_check(*c.instance.sampling, *c.instance.sampling, c.instance.result, constant);
  r.samples = sa.same_side_pairs;
  r.worst_violation = sa.worst_ratio;
  r.implied_constant = constant;
  r.details = {{"w2", c.instance.result.w2}, {"rho0", c.instance.mu.density_min()},
               {"conerad", c.cone_half.conerad_safe}, {"skipped_pairs", sa.skipped_pairs}};
  r.settle();
  return r;
}

VerificationReport check_threshold(const Context& c) {
  auto r = start(c, "threshold", "explicit W2 smallness threshold for a Monge solution");
  r.details = {{"hard", false}};
  if (c.n < 2) {
    skip_low_dimension(r);
    r.details["hard"] = false;
    return r;
  }
  const double constant = stay_away_const(c);
  const auto t = threshold_eval(c.n, c.cone_strict.conerad_safe, constant, c.metrics.geodesic_constant,
                                c.metrics.radial_lipschitz, c.instance.result.w2);
  r.samples = c.instance.sampling->size();
  r.implied_constant = t.rhs;
  r.details = {{"hard", false},
               {"rhs", t.rhs},
               {"first_term", t.first_term},
               {"second_term", t.second_term},
               {"w2_threshold", t.w2_threshold},
               {"w2", c.instance.result.w2},
               {"verdict", t.verdict}};
  r.worst_violation = 0;
  r.settle();
  return r;
}

VerificationReport check_potential_lipschitz(const Context& c) {
  auto r = start(c, "potential_lipschitz", "potential Lipschitz bound and nonsplitting of subdifferentials");
  const double w2 = c.instance.result.w2;
  const double bound = c.n >= 2 ? stay_away_const(c) * c.metrics.radial_lipschitz * c.metrics.radial_lipschitz *
                                      std::pow(w2, 2.0 / (c.n + 2))
                                : 0.0;
  const std::vector<double> deltas{0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0};
  const auto pl = potential_lipschitz_check(*c.instance.sampling, c.instance.result.dual, bound,
                                            c.cone_half.conerad_safe, c.metrics.geodesic_constant, deltas);
  std::size_t exceptions = 0;
  json scans = json::array();
  for (const auto& s : pl.scans) {
    if (s.hypothesis) exceptions += s.exceptions;
    scans.push_back({{"delta", s.delta}, {"hypothesis", s.hypothesis}, {"exceptions", s.exceptions}});
  }
  r.samples = c.instance.sampling->size();
  r.worst_violation = static_cast<double>(exceptions) + (pl.within_bound ? 0.0 : 1.0);
  r.details = {{"lipschitz", pl.lipschitz},         {"bound", pl.bound},
               {"within_bound", pl.within_bound},   {"graph_constant", pl.graph_constant},
               {"worst_distance", pl.worst_distance}, {"scans", scans}};
  r.settle();
  return r;
}

VerificationReport check_local_to_global(const Context& c) {
  auto r = start(c, "local_to_global", "local subdifferential lifts into the global c-subdifferential");
  const double rho = 0.1 * c.cone_half.conerad_safe;
  const auto pot = SyntheticPotential::crease(c.body, c.x0, crease_tangents(c.n, rho));
  r.tolerance = 1e-12 * std::max(1.0, c.diam * c.diam);
  const auto lg = local_to_global_check(c.body, pot, c.x0, *c.instance.sampling, r.tolerance);
  r.samples = c.instance.sampling->size();
  r.worst_violation = lg.worst_slack;
  r.details = {{"extreme_points", lg.extreme_points}, {"midpoint_slack", lg.midpoint_slack}};
  r.settle();
  return r;
}

VerificationReport check_holder_fit(const Context& c) {
  auto r = start(c, "holder_fit", "empirical Holder exponent of the optimal map");
  r.tolerance = 0.5;
  const auto& sampling = *c.instance.sampling;
  const double spacing = sampling.spacing();
  try {
    const auto images = plan_map(c.instance.result.plan, c.instance.mu.mass, sampling.positions(), 3 * spacing);
    const auto fit = holder_fit(sampling.positions(), images, 0.1 * c.diam);
    r.samples = fit.pairs;
    r.worst_violation = fit.residual;
    r.details = {{"hard", false}, {"exponent", fit.exponent}, {"residual", fit.residual}};
  } catch (const Error& e) {
    r.worst_violation = std::numeric_limits<double>::infinity();
    r.details = {{"hard", false}, {"error", error_name(e.code())}};
  }
  r.settle();
  return r;
}

}  // namespace

bool hard_failure(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass && r.details.value("hard", true)) return true;
  return false;
}

std::vector<VerificationReport> verify_battery(const ExperimentConfig& config, unsigned threads) {
  Context c(config, config.make_body());
  c.n = c.body.dim();
  c.diam = c.body.diam();
  c.x0 = detail::generic_point(c.body);
  c.cone_half = conerad(c.body, 0.5);
  c.cone_strict = conerad(c.body, 35.0 / 36.0);
  c.metrics = body_metrics(c.body);
  c.instance = detail::make_instance(c.body, base_size(c), config.seed, config.source, config.target, config.solver);
  c.shift = SyntheticPotential::shift(c.instance.sampling->positions(), Vec::UnitX(), 0.05 * c.diam);
  c.shift_values = c.shift.evaluate(c.instance.sampling->positions());

  using Checker = std::function<VerificationReport(const Context&)>;
  static const std::map<std::string, Checker> table{
      {"c_cone", check_c_cone},
      {"holder_fit", check_holder_fit},
      {"local_to_global", check_local_to_global},
      {"lower_aleksandrov", check_lower_aleksandrov},
      {"potential_lipschitz", check_potential_lipschitz},
      {"qqconv", check_qqconv},
      {"section_convexity", check_section_convexity},
      {"section_locality", check_section_locality},
      {"stay_away", check_stay_away},
      {"threshold", check_threshold},
      {"upper_aleksandrov", check_upper_aleksandrov},
  };
  std::vector<std::string> names = config.checkers;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<VerificationReport> out(names.size());
  detail::parallel_for(names.size(), threads, [&](std::size_t i) {
    try {
      out[i] = table.at(names[i])(c);
    } catch (const Error& e) {
      // A refused hypothesis or degenerate input is a failed check, not a crashed battery.
      out[i] = start(c, names[i].c_str(), "checker raised an error");
      out[i].checker = names[i];
      out[i].worst_violation = std::numeric_limits<double>::infinity();
      out[i].details = {{"error", error_name(e.code())}, {"message", e.what()}};
      out[i].settle();
    }
  });
  return out;
}

}  // namespace otsurf
