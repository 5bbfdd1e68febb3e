#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "otsurf/theory.hpp"

namespace otsurf {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Fixed initial panels so that symmetric integrands cannot fake convergence at the first level.
double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  constexpr int kPanels = 16;
  double sum = 0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + (b - a) * p / kPanels, hi = a + (b - a) * (p + 1) / kPanels;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    sum += simpson(f, lo, hi, fa, fm, fb, (hi - lo) / 6 * (fa + 4 * fm + fb), tol / kPanels, 40);
  }
  return sum;
}

}  // namespace

double stay_away_integral(int n) {
  if (n < 2) throw Error(ErrorCode::DimensionTooLow, "stay-away integral needs n >= 2");
  return integrate([n](double t) { return std::pow(std::cos(t), n + 2) * std::pow(std::sin(t), n - 2); }, 0.0,
                   0.5 * std::numbers::pi, 1e-12);
}

double sphere_measure(int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "sphere dimension must be nonnegative");
  const double h = 0.5 * (k + 1);
  return 2 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double stay_away_constant(int n, double rho0, double conerad, double diam) {
  if (n < 2) throw Error(ErrorCode::DimensionTooLow, "stay-away constant is defined for n >= 2");
  if (!(rho0 > 0)) throw Error(ErrorCode::NonPositiveDensity, "density lower bound must be positive");
  if (!(conerad > 0) || !(diam > 0)) throw Error(ErrorCode::InvalidArgument, "radii must be positive");
  const double r2 = conerad * conerad;
  const double m = std::min({r2 / (48 * diam * diam + 2 * r2), conerad / (8 * diam), 1.0 / 16});
  const double pref = std::pow(2.0, n - 2) * rho0 * sphere_measure(n - 2) / (n * (n + 1.0));
  return std::pow(pref * std::pow(m, n) * stay_away_integral(n), -1.0 / (n + 1));
}

StayAway stay_away_check(const SurfaceSampling& src, const SurfaceSampling& dst,
                         const TransportResult& result, double constant) {
  const int n = src.body.dim();
  if (n < 2) throw Error(ErrorCode::DimensionTooLow, "stay-away estimate is stated for n >= 2");
  StayAway r;
  r.constant = constant;
  const double scale = constant * std::pow(result.w2, 2.0 / (n + 2));
  for (const auto& e : result.plan.entries) {
    const auto& x = src.points[e.i];
    const auto& y = dst.points[e.j];
    if (!(y.normal.dot(x.normal) > 0)) {
      ++r.skipped_pairs;
      continue;
    }
    ++r.same_side_pairs;
    const Vec d = y.x - x.x;
    const double gap = (d - d.dot(x.normal) * x.normal).norm();
    const double ratio = scale > 0 ? gap / scale : (gap > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.worst_ratio = std::max(r.worst_ratio, ratio);
  }
  r.pass = r.worst_ratio <= 1.0;
  return r;
}

Threshold threshold_eval(int n, double conerad_strict, double constant, double geodesic_constant,
                         double radial_lipschitz, double w2) {
  if (n < 2) throw Error(ErrorCode::DimensionTooLow, "threshold is stated for n >= 2");
  if (!(constant > 0) || !(conerad_strict > 0)) throw Error(ErrorCode::InvalidArgument, "threshold inputs must be positive");
  Threshold t;
  t.first_term = conerad_strict / (64 * constant);
  t.second_term = conerad_strict / (16 * constant * geodesic_constant * radial_lipschitz * radial_lipschitz);
  t.rhs = std::max(t.first_term, t.second_term);
  t.w2_threshold = std::pow(t.rhs, 0.5 * (n + 2));
  t.verdict = std::pow(w2, 2.0 / (n + 2)) < t.rhs;
  return t;
}

PotentialLipschitz potential_lipschitz_check(const SurfaceSampling& sampling, const DualPair& dual,
                                             double bound, double conerad, double geodesic_constant,
                                             const std::vector<double>& deltas, int knn) {
  const std::size_t m = sampling.size();
  if (dual.u.size() != m || dual.uc.size() != m)
    throw Error(ErrorCode::InvalidArgument, "duals must live on the shared sampling");
  const auto pts = sampling.positions();
  const KnnGraph g = knn_graph(pts, knn);
  if (!g.connected()) throw Error(ErrorCode::InsufficientSamples, "neighbour graph is disconnected");
  PotentialLipschitz r;
  for (std::size_t i = 0; i < m; ++i)
    for (auto [j, len] : g.adj[i])
      if (len > 0) r.lipschitz = std::max(r.lipschitz, std::abs(dual.u[i] - dual.u[j]) / len);
  // Path sums bound |u_i - u_j| by lipschitz * graph distance, so this ratio closes the chain.
  for (std::size_t i = 0; i < m; ++i) {
    const auto dist = g.dijkstra(static_cast<int>(i));
    for (std::size_t j = i + 1; j < m; ++j) {
      const double eu = (pts[i] - pts[j]).norm();
      if (eu > 0) r.graph_constant = std::max(r.graph_constant, dist[j] / eu);
    }
  }
  r.bound = bound;
  r.within_bound = !(bound > 0) || r.lipschitz <= kLipschitzSlack * bound;

  const double scale = std::max(1.0, sampling.body.diam() * sampling.body.diam());
  std::vector<double> pair_dist;
  for (std::size_t i = 0; i < m; ++i) {
    for (int j : c_subdifferential(dual, static_cast<int>(i), pts, pts, 1e-12 * scale)) {
      const double d = (pts[i] - pts[j]).norm();
      pair_dist.push_back(d);
      r.worst_distance = std::max(r.worst_distance, d);
    }
  }
  const double reach = 2 * r.lipschitz * std::max(r.graph_constant, geodesic_constant);
  for (double delta : deltas) {
    NonsplittingScan s;
    s.delta = delta;
    const double radius = delta * conerad;
    s.hypothesis = reach < radius;
    s.exceptions = static_cast<std::size_t>(std::count_if(pair_dist.begin(), pair_dist.end(),
                                                          [radius](double d) { return d > radius; }));
    r.scans.push_back(s);
  }
  return r;
}

}  // namespace otsurf
