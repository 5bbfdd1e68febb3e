#include <algorithm>
#include <cmath>
#include <limits>

#include "convex_hull.hpp"
#include "shape_impl.hpp"

namespace otsurf {

namespace {

// Intersection of balls of radius R centred at the vertices of a polytope.
class BallHullShape final : public ShapeImpl {
 public:
  BallHullShape(int dim, std::vector<Vec> v, double r, nlohmann::json base_spec, std::size_t dirs)
      : centers(std::move(v)), radius(r), base(std::move(base_spec)), directions(dirs) {
    n = dim;
  }
  Shape shape() const override { return Shape::BallHull; }
  double level(const Vec& x) const override {
    double worst = 0;
    for (const auto& c : centers) worst = std::max(worst, (x - c).squaredNorm());
    return std::sqrt(worst) - radius;
  }
  std::optional<std::pair<double, double>> line_interval(const Vec& q, const Vec& d) const override {
    double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : centers) {
      auto iv = ball_interval(q, d, c, radius);
      if (!iv) return std::nullopt;
      lo = std::max(lo, iv->first);
      hi = std::min(hi, iv->second);
      if (lo > hi) return std::nullopt;
    }
    return std::make_pair(lo, hi);
  }
  NormalQuery normal_raw(const Vec& x) const override {
    double worst = 0;
    for (const auto& c : centers) worst = std::max(worst, (x - c).norm());
    Vec sum = Vec::Zero();
    Vec first = Vec::Zero();
    bool kink = false;
    for (const auto& c : centers) {
      double dist = (x - c).norm();
      if (dist < worst - 1e-9 * radius) continue;
      Vec nn = (x - c) / dist;
      if (first.isZero()) first = nn;
      else if ((nn - first).norm() > 1e-2) kink = true;
      sum += nn;
    }
    if (n == 1) sum[2] = 0;
    return {sum.normalized(), kink};
  }
  double support(const Vec& u) const override {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, u.dot(c));
    return best + radius * u.norm();
  }
  nlohmann::json to_json() const override {
    return {{"shape", "ball_hull"}, {"base", base}, {"hull_radius", radius},
            {"directions", directions}};
  }
  std::vector<Vec> centers;
  double radius;
  nlohmann::json base;
  std::size_t directions;
};

double covering_angle(int n, const std::vector<Vec>& dirs) {
  if (n == 1) return M_PI / static_cast<double>(dirs.size());
  auto probes = direction_grid(2, 4000, 987654321ULL);
  double worst = 0;
  for (const auto& p : probes) {
    double best = -1;
    for (const auto& u : dirs) best = std::max(best, p.dot(u));
    worst = std::max(worst, std::acos(std::clamp(best, -1.0, 1.0)));
  }
  return 1.1 * worst;
}

// Vertices of {c : <c, u_k> <= g_k}, all g_k > 0, via the polar hull of u_k / g_k.
std::vector<Vec> polytope_vertices(int n, const std::vector<Vec>& dirs, const std::vector<double>& g) {
  std::vector<Vec> out;
  if (n == 1) {
    std::vector<Eigen::Vector2d> dual(dirs.size());
    for (std::size_t k = 0; k < dirs.size(); ++k) dual[k] = dirs[k].head<2>() / g[k];
    auto hull = convex_hull_2d(dual);
    for (std::size_t e = 0; e < hull.size(); ++e) {
      Eigen::Matrix2d a;
      a.row(0) = dual[hull[e]].transpose();
      a.row(1) = dual[hull[(e + 1) % hull.size()]].transpose();
      Eigen::Vector2d c = a.partialPivLu().solve(Eigen::Vector2d::Ones());
      out.emplace_back(c.x(), c.y(), 0.0);
    }
  } else {
    std::vector<Vec> dual(dirs.size());
    for (std::size_t k = 0; k < dirs.size(); ++k) dual[k] = dirs[k] / g[k];
    for (const auto& f : convex_hull_3d(dual)) {
      Eigen::Matrix3d a;
      for (int r = 0; r < 3; ++r) a.row(r) = dual[f[r]].transpose();
      out.push_back(a.partialPivLu().solve(Vec::Ones()));
    }
  }
  return out;
}

}  // namespace

ConvexBody ball_hull(const ConvexBody& body, double hull_radius, std::size_t directions) {
  const int n = body.dim();
  const double diam = body.diam();
  if (!(hull_radius >= 0.5 * diam))
    throw Error(ErrorCode::RadiusTooSmall, "hull radius below half the diameter");
  if (directions == 0) directions = n == 1 ? 4096 : 6000;
  const auto dirs = direction_grid(n, directions, 1);
  // Containment oracle: dense boundary sample of the base body.
  const auto probe_dirs = direction_grid(n, 4 * directions, 2);
  std::vector<Vec> probes;
  probes.reserve(probe_dirs.size());
  for (const auto& u : probe_dirs) probes.push_back(body.boundary_along(u).x);

  std::vector<double> base_g(dirs.size());
  double gmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    base_g[k] = hull_radius - body.support(-dirs[k]);
    gmin = std::min(gmin, base_g[k]);
  }
  const double alpha = covering_angle(n, dirs);
  double shrink = hull_radius * alpha * alpha;
  if (gmin - shrink <= 0)
    throw Error(ErrorCode::RadiusTooSmall, "hull radius too small for a centred ball hull");

  std::vector<Vec> centers;
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<double> g(base_g);
    for (auto& v : g) v -= shrink;
    if (*std::min_element(g.begin(), g.end()) <= 0)
      throw Error(ErrorCode::RadiusTooSmall, "hull radius too small for a centred ball hull");
    centers = polytope_vertices(n, dirs, g);
    double excess = -std::numeric_limits<double>::infinity();
    for (const auto& c : centers) {
      double far = 0;
      for (const auto& p : probes) far = std::max(far, (p - c).squaredNorm());
      excess = std::max(excess, std::sqrt(far) - hull_radius);
    }
    if (excess <= -1e-10 * hull_radius) break;
    shrink += 1.5 * std::max(excess, 0.0) + 1e-9 * hull_radius;
  }

  auto impl = std::make_shared<BallHullShape>(n, std::move(centers), hull_radius, body.to_json(),
                                              directions);
  double dmax = 0, rin = std::numeric_limits<double>::infinity(), rout = 0;
  for (const auto& u : dirs) {
    double hp = impl->support(u), hm = impl->support(-u);
    dmax = std::max(dmax, hp + hm);
    rin = std::min(rin, hp);
    rout = std::max(rout, hp);
  }
  impl->cache = {dmax, rin, rout};
  return ConvexBody(impl);
}

}  // namespace otsurf
