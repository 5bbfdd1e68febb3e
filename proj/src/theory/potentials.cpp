#include <algorithm>
#include <cmath>
#include <limits>

#include "otsurf/random.hpp"
#include "otsurf/theory.hpp"

namespace otsurf {

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["checker"] = checker;
  j["anchor"] = anchor;
  j["samples"] = samples;
  j["worst_violation"] = worst_violation;
  j["implied_constant"] = implied_constant ? nlohmann::json(*implied_constant) : nlohmann::json(nullptr);
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["details"] = details;
  j["config"] = config;
  return j;
}

double SyntheticPotential::operator()(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < slopes.size(); ++k) best = std::max(best, -cost(x, slopes[k]) + offsets[k]);
  return best;
}

int SyntheticPotential::argmax(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  int arg = -1;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    double v = -cost(x, slopes[k]) + offsets[k];
    if (v > best) best = v, arg = static_cast<int>(k);
  }
  return arg;
}

std::vector<int> SyntheticPotential::active(const Vec& x, double tol) const {
  const double top = (*this)(x);
  std::vector<int> out;
  for (std::size_t k = 0; k < slopes.size(); ++k)
    if (-cost(x, slopes[k]) + offsets[k] >= top - tol) out.push_back(static_cast<int>(k));
  return out;
}

std::vector<double> SyntheticPotential::evaluate(const std::vector<Vec>& pts) const {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = (*this)(pts[i]);
  return out;
}

SyntheticPotential SyntheticPotential::shift(const std::vector<Vec>& pts, const Vec& direction, double kappa) {
  SyntheticPotential u;
  u.slopes = pts;
  u.offsets.resize(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) u.offsets[k] = kappa * pts[k].dot(direction);
  return u;
}

SyntheticPotential SyntheticPotential::crease(const ConvexBody& body, const Vec& x0,
                                              const std::vector<Tan>& tangents) {
  const TangentChart chart = chart_at(body, x0);
  SyntheticPotential u;
  for (const auto& p : tangents) {
    Vec z = c_exp(chart, p).x;
    u.slopes.push_back(z);
    u.offsets.push_back(cost(x0, z));
  }
  return u;
}

std::vector<int> assign_targets(const PotentialOnSamples& pot) {
  const auto& src = pot.sources->points;
  const auto& dst = pot.targets->points;
  if (pot.u.size() != src.size()) throw Error(ErrorCode::InvalidArgument, "potential and sources differ in size");
  std::vector<int> out(dst.size());
  for (std::size_t j = 0; j < dst.size(); ++j) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      double v = -cost(src[i].x, dst[j].x) - pot.u[i];
      if (v > best) best = v, arg = static_cast<int>(i);
    }
    out[j] = arg;
  }
  return out;
}

double qqconv_check(const ConvexBody& body, const Vec& x0, const Vec& x, const Vec& xbar0,
                    const Vec& xbar1, const std::vector<double>& t_grid) {
  const TangentChart chart = chart_at(body, x0);
  // f(t) = c(x0, Xbar_t) - c(x, Xbar_t); the endpoints are rebuilt through the chart so every
  // value shares the same graph evaluation.
  auto f = [&](double t) {
    const Vec y = c_segment(chart, xbar0, xbar1, t).x;
    return cost(x0, y) - cost(x, y);
  };
  const double f0 = f(0.0), f1 = f(1.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) worst = std::max(worst, f(t) - f0 - t * (f1 - f0));
  return worst;
}

VerificationReport qqconv_battery(const ConvexBody& body, std::size_t trials, std::size_t t_points,
                                  std::uint64_t seed) {
  if (t_points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two t values");
  VerificationReport rep;
  rep.checker = "qqconv";
  rep.anchor = "segment quasi-convexity of c-affine differences";
  rep.tolerance = 1e-9 * body.diam() * body.diam();
  std::vector<double> grid(t_points);
  for (std::size_t k = 0; k < t_points; ++k) grid[k] = static_cast<double>(k) / static_cast<double>(t_points - 1);
  Rng rng(seed);
  const int n = body.dim();
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t done = 0, rejected = 0;
  while (done < trials && rejected < 50 * trials + 100) {
    const SurfacePoint p0 = body.boundary_along(rng.direction(n));
    if (p0.non_unique) {
      ++rejected;
      continue;
    }
    const SurfacePoint a = body.boundary_along(rng.direction(n));
    const SurfacePoint b = body.boundary_along(rng.direction(n));
    if (a.non_unique || b.non_unique || a.normal.dot(p0.normal) <= 0 || b.normal.dot(p0.normal) <= 0) {
      ++rejected;
      continue;
    }
    // Any point of the body works: shrink a boundary point toward the interior origin.
    const Vec x = rng.uniform() * body.boundary_along(rng.direction(n)).x;
    worst = std::max(worst, qqconv_check(body, p0.x, x, a.x, b.x, grid));
    ++done;
  }
  rep.samples = done;
  rep.worst_violation = done ? std::max(worst, 0.0) : 0.0;
  rep.settle();
  if (done < trials) rep.pass = false;
  rep.details = {{"max_raw", done ? worst : 0.0}, {"rejected_draws", rejected}, {"t_points", t_points}};
  rep.config = {{"shape", shape_name(body.shape())}, {"trials", trials}, {"seed", seed}};
  return rep;
}

}  // namespace otsurf
