#include "otsurf/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include "network_simplex.hpp"
#include "otsurf/random.hpp"

namespace otsurf {

namespace {

constexpr std::int64_t kFlowScale = 1'000'000'000'000'000LL;

void check_masses(const std::vector<Vec>& pts, const std::vector<double>& m, const char* side) {
  if (pts.size() != m.size())
    throw Error(ErrorCode::InvalidArgument, std::string(side) + " points and masses differ in size");
  if (pts.empty()) throw Error(ErrorCode::InvalidArgument, std::string(side) + " measure is empty");
  for (double v : m)
    if (!(v >= 0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, std::string(side) + " masses must be nonnegative");
}

void check_balance(const std::vector<double>& a, const std::vector<double>& b) {
  double sa = std::accumulate(a.begin(), a.end(), 0.0);
  double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, sa))
    throw Error(ErrorCode::Unbalanced, "source and target masses differ");
}

std::vector<Vec> positions(const DiscreteMeasure& m) { return m.sampling->positions(); }

}  // namespace

std::vector<double> c_transform(const std::vector<double>& values, const std::vector<Vec>& from,
                                const std::vector<Vec>& to) {
  std::vector<double> out(to.size());
  for (std::size_t j = 0; j < to.size(); ++j) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < from.size(); ++i) best = std::max(best, -cost(from[i], to[j]) - values[i]);
    out[j] = best;
  }
  return out;
}

void tighten_duals(DualPair& dual, const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  const double shift = dual.u[0];
  for (double& v : dual.u) v -= shift;
  for (double& v : dual.uc) v += shift;
  // Idempotence of the double transform holds up to rounding; iterate until it is bitwise.
  for (int pass = 0; pass < 8; ++pass) {
    dual.uc = c_transform(dual.u, xs, ys);
    std::vector<double> next = c_transform(dual.uc, ys, xs);
    bool same = next == dual.u;
    dual.u = std::move(next);
    if (same) break;
  }
}

void audit_duals(DualPair& dual, const TransportPlan& plan, const std::vector<Vec>& xs,
                 const std::vector<Vec>& ys) {
  double infeas = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      infeas = std::max(infeas, -(dual.u[i] + dual.uc[j] + cost(xs[i], ys[j])));
  dual.infeasibility = infeas;
  double slack = 0;
  for (const auto& e : plan.entries)
    slack = std::max(slack, dual.u[e.i] + dual.uc[e.j] + cost(xs[e.i], ys[e.j]));
  dual.support_slack = slack;
  auto uu = c_transform(c_transform(dual.u, xs, ys), ys, xs);
  double tight = 0;
  for (std::size_t i = 0; i < uu.size(); ++i) tight = std::max(tight, std::abs(uu[i] - dual.u[i]));
  dual.tightness = tight;
}

double dual_objective(const DualPair& dual, const std::vector<double>& a, const std::vector<double>& b) {
  double sa = std::accumulate(a.begin(), a.end(), 0.0);
  double sb = std::accumulate(b.begin(), b.end(), 0.0);
  double v = 0;
  for (std::size_t i = 0; i < a.size(); ++i) v -= a[i] / sa * dual.u[i];
  for (std::size_t j = 0; j < b.size(); ++j) v -= b[j] / sb * dual.uc[j];
  return v;
}

namespace {

void finish_plan(TransportPlan& plan, const std::vector<Vec>& xs, const std::vector<double>& a,
                 const std::vector<Vec>& ys, const std::vector<double>& b) {
  plan.sources = xs.size();
  plan.targets = ys.size();
  double sa = std::accumulate(a.begin(), a.end(), 0.0);
  double sb = std::accumulate(b.begin(), b.end(), 0.0);
  std::vector<double> rows(xs.size(), 0.0), cols(ys.size(), 0.0);
  plan.cost = 0;
  for (const auto& e : plan.entries) {
    rows[e.i] += e.mass;
    cols[e.j] += e.mass;
    plan.cost += e.mass * cost(xs[e.i], ys[e.j]);
  }
  plan.row_residual = plan.col_residual = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    plan.row_residual = std::max(plan.row_residual, std::abs(rows[i] - a[i] / sa));
  for (std::size_t j = 0; j < cols.size(); ++j)
    plan.col_residual = std::max(plan.col_residual, std::abs(cols[j] - b[j] / sb));
}

void finish_result(TransportResult& r, const std::vector<Vec>& xs, const std::vector<double>& a,
                   const std::vector<Vec>& ys, const std::vector<double>& b) {
  tighten_duals(r.dual, xs, ys);
  audit_duals(r.dual, r.plan, xs, ys);
  r.primal = r.plan.cost;
  r.dual_value = dual_objective(r.dual, a, b);
  r.gap = std::abs(r.primal - r.dual_value) / std::max(1.0, r.primal);
}

}  // namespace

TransportResult solve_exact(const std::vector<Vec>& xs, const std::vector<double>& a,
                            const std::vector<Vec>& ys, const std::vector<double>& b) {
  check_masses(xs, a, "source");
  check_masses(ys, b, "target");
  check_balance(a, b);
  if (xs.size() > kMaxExactSize || ys.size() > kMaxExactSize)
    throw Error(ErrorCode::SizeExceeded, "exact solver is limited to desk-scale instances");
  const auto t0 = std::chrono::steady_clock::now();
  auto supply = detail::integer_masses(a, kFlowScale);
  auto demand = detail::integer_masses(b, kFlowScale);
  auto sol = detail::transport_simplex(xs, supply, ys, demand);

  TransportResult r;
  r.stats.solver = "exact";
  r.stats.iterations = sol.pivots;
  r.stats.degenerate_arcs = sol.degenerate_arcs;
  r.stats.unique_optimum = sol.degenerate_arcs == 0;
  for (const auto& arc : sol.basis)
    if (arc.flow > 0)
      r.plan.entries.push_back({arc.source, arc.target,
                                static_cast<double>(arc.flow) / static_cast<double>(kFlowScale)});
  std::sort(r.plan.entries.begin(), r.plan.entries.end(), [](const PlanEntry& p, const PlanEntry& q) {
    return p.i != q.i ? p.i < q.i : p.j < q.j;
  });
  finish_plan(r.plan, xs, a, ys, b);
  r.dual.u.resize(xs.size());
  r.dual.uc.resize(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) r.dual.u[i] = -sol.source_pot[i];
  for (std::size_t j = 0; j < ys.size(); ++j) r.dual.uc[j] = -sol.target_pot[j];
  finish_result(r, xs, a, ys, b);
  r.w2 = std::sqrt(std::max(r.plan.cost, 0.0));
  r.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

TransportResult solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return solve_exact(positions(mu), mu.mass, positions(nu), nu.mass);
}

TransportResult solve_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const EntropicOptions& options) {
  return solve_entropic(positions(mu), mu.mass, positions(nu), nu.mass, options);
}

std::vector<int> c_subdifferential(const DualPair& dual, int i, const std::vector<Vec>& xs,
                                   const std::vector<Vec>& ys, double tol) {
  std::vector<int> out;
  double best = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    double v = dual.u[i] + dual.uc[j] + cost(xs[i], ys[j]);
    if (v < best) best = v, arg = static_cast<int>(j);
    if (v <= tol) out.push_back(static_cast<int>(j));
  }
  if (std::find(out.begin(), out.end(), arg) == out.end()) out.insert(std::upper_bound(out.begin(), out.end(), arg), arg);
  return out;
}

SpreadReport monge_spread(const TransportPlan& plan, const std::vector<double>& source_mass,
                          const std::vector<Vec>& ys, double tau, double cluster_radius) {
  SpreadReport r;
  r.spread.assign(plan.sources, 0.0);
  std::vector<std::vector<std::pair<int, double>>> rows(plan.sources);
  for (const auto& e : plan.entries) rows[e.i].emplace_back(e.j, e.mass);
  const double total = std::accumulate(source_mass.begin(), source_mass.end(), 0.0);
  double moved = 0;
  for (std::size_t i = 0; i < plan.sources; ++i) {
    const double mi = source_mass[i] / total;
    std::vector<int> active;
    int main = -1;
    double main_mass = -1;
    for (auto [j, m] : rows[i]) {
      moved += m;
      if (m > tau * mi) active.push_back(j);
      if (m > main_mass) main_mass = m, main = j;
    }
    double diam = 0;
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b = a + 1; b < active.size(); ++b)
        diam = std::max(diam, (ys[active[a]] - ys[active[b]]).norm());
    r.spread[i] = diam;
    r.max_spread = std::max(r.max_spread, diam);
    if (main < 0) continue;
    for (auto [j, m] : rows[i])
      if ((ys[j] - ys[main]).norm() > cluster_radius) r.split_mass += m;
  }
  r.split_fraction = moved > 0 ? r.split_mass / moved : 0.0;
  return r;
}

MonotonicityCheck cyclical_monotonicity_check(const TransportPlan& plan, const std::vector<Vec>& xs,
                                              const std::vector<Vec>& ys, std::size_t pairs,
                                              std::uint64_t seed) {
  MonotonicityCheck out;
  const auto& e = plan.entries;
  if (e.size() < 2) return out;
  Rng rng(seed);
  out.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto& p = e[rng.index(e.size())];
    const auto& q = e[rng.index(e.size())];
    double lhs = cost(xs[p.i], ys[p.j]) + cost(xs[q.i], ys[q.j]);
    double rhs = cost(xs[p.i], ys[q.j]) + cost(xs[q.i], ys[p.j]);
    out.worst = std::max(out.worst, lhs - rhs);
    ++out.pairs;
  }
  return out;
}

void write_plan_csv(const std::string& path, const TransportPlan& plan) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  f << std::setprecision(17) << "i,j,mass\n";
  for (const auto& e : plan.entries) f << e.i << ',' << e.j << ',' << e.mass << '\n';
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

void write_duals_csv(const std::string& path, const std::vector<double>& values) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  f << std::setprecision(17) << "index,u\n";
  for (std::size_t i = 0; i < values.size(); ++i) f << i << ',' << values[i] << '\n';
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace otsurf
