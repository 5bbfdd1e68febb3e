#include <algorithm>
#include <cmath>
#include <limits>

#include "otsurf/theory.hpp"
#include "planar.hpp"

namespace otsurf {

LocalToGlobal local_to_global_check(const ConvexBody& body, const SyntheticPotential& potential,
                                    const Vec& x0, const SurfaceSampling& sampling, double tol) {
  const TangentChart chart = chart_at(body, x0);
  const Vec& n0 = chart.base().normal;
  const double scale = std::max(1.0, body.diam() * body.diam());
  const auto act = potential.active(x0, 1e-12 * scale);
  std::vector<Tan> proj;
  for (int k : act) {
    const Vec& z = potential.slopes[k];
    if (!(body.normal(z).normal.dot(n0) > 0))
      throw Error(ErrorCode::HypothesisFailed, "an active slope lies on the far side");
    proj.push_back(chart.project(z));
  }
  const detail::TangentHull hull(body.dim(), proj);

  const double ux0 = potential(x0);
  const auto values = potential.evaluate(sampling.positions());
  // u(x0) + c(x0, Y) + u^c(Y) over the sampling plus x0; zero exactly when Y is a global slope.
  auto slack = [&](const Vec& y) {
    double best = -cost(x0, y) - ux0;
    for (std::size_t i = 0; i < sampling.size(); ++i)
      best = std::max(best, -cost(sampling.points[i].x, y) - values[i]);
    return ux0 + cost(x0, y) + best;
  };

  LocalToGlobal r;
  std::vector<Vec> ends;
  for (const auto& v : hull.vertices()) {
    const Vec y = c_exp(chart, v).x;
    ends.push_back(y);
    r.worst_slack = std::max(r.worst_slack, slack(y));
  }
  r.extreme_points = ends.size();
  if (ends.size() >= 2) {
    r.midpoint_slack = slack(c_segment(chart, ends[0], ends[1], 0.5).x);
    r.worst_slack = std::max(r.worst_slack, r.midpoint_slack);
  }
  r.pass = r.worst_slack <= tol;
  return r;
}

HolderFit holder_fit(const std::vector<Vec>& xs, const std::vector<Vec>& images, double max_distance) {
  if (xs.size() != images.size()) throw Error(ErrorCode::InvalidArgument, "points and images differ in size");
  std::vector<double> lx, ly;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = a + 1; b < xs.size(); ++b) {
      const double dx = (xs[a] - xs[b]).norm(), dy = (images[a] - images[b]).norm();
      if (dx <= 0 || dx > max_distance || dy <= 0) continue;
      lx.push_back(std::log(dx));
      ly.push_back(std::log(dy));
    }
  }
  if (lx.size() < 2) throw Error(ErrorCode::InsufficientSamples, "too few pairs for a Holder fit");
  const double k = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= k, my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
  if (!(sxx > 0)) throw Error(ErrorCode::InsufficientSamples, "pair distances do not vary");
  HolderFit fit;
  fit.exponent = sxy / sxx;
  const double icpt = my - fit.exponent * mx;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (icpt + fit.exponent * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / k);
  fit.pairs = lx.size();
  return fit;
}

std::vector<Vec> plan_map(const TransportPlan& plan, const std::vector<double>& source_mass,
                          const std::vector<Vec>& ys, double max_spread) {
  constexpr double kMapTau = 0.05;
  const SpreadReport spread = monge_spread(plan, source_mass, ys, kMapTau);
  if (spread.max_spread > max_spread)
    throw Error(ErrorCode::PlanNotMapLike, "plan splits mass beyond the allowed spread");
  std::vector<Vec> out(plan.sources, Vec::Zero());
  std::vector<double> best(plan.sources, -1.0);
  for (const auto& e : plan.entries)
    if (e.mass > best[e.i]) best[e.i] = e.mass, out[e.i] = ys[e.j];
  return out;
}

}  // namespace otsurf
