#include <algorithm>
#include <cmath>
#include <limits>

#include "otsurf/random.hpp"
#include "shape_impl.hpp"

namespace otsurf {

namespace {

struct NormalPair {
  double dist;
  double gap;  // |N1 - N2|
};

// Pairs whose separations are log-uniform between 1e-4 diam and diam.
std::vector<NormalPair> local_pairs(const ConvexBody& body, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  const int n = body.dim();
  const double diam = body.diam();
  std::vector<NormalPair> out;
  out.reserve(count);
  while (out.size() < count) {
    Vec u = rng.direction(n);
    SurfacePoint a = body.boundary_along(u);
    double target = diam * std::exp(rng.uniform(std::log(1e-4), 0.0));
    Vec tang = rng.direction(n);
    tang -= tang.dot(u) * u;
    if (tang.norm() < 1e-9) continue;
    tang.normalize();
    double ang = std::min(target / a.x.norm(), M_PI);
    Vec v = std::cos(ang) * u + std::sin(ang) * tang;
    SurfacePoint b = body.boundary_along(v);
    out.push_back({(a.x - b.x).norm(), (a.normal - b.normal).norm()});
  }
  return out;
}

}  // namespace

ConeParams conerad(const ConvexBody& body, double theta, std::size_t pair_budget,
                   std::uint64_t seed) {
  if (!body.is_c1()) throw Error(ErrorCode::NotC1, "conerad requires a C1 body");
  if (!(theta > 0 && theta < 1)) throw Error(ErrorCode::InvalidArgument, "theta must lie in (0,1)");
  const double thr = std::sqrt(2 - 2 * theta);
  const int n = body.dim();

  // Half the budget on all pairs of a quasi-uniform set, half on multiscale local pairs.
  std::size_t global = std::max<std::size_t>(pair_budget / 2, 1);
  std::size_t m = static_cast<std::size_t>(std::ceil((1 + std::sqrt(1.0 + 8.0 * global)) / 2));
  auto dirs = direction_grid(n, m, seed);
  std::vector<SurfacePoint> pts;
  for (const auto& d : dirs) pts.push_back(body.boundary_along(d));
  std::vector<NormalPair> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      pairs.push_back({(pts[i].x - pts[j].x).norm(), (pts[i].normal - pts[j].normal).norm()});
  auto local = local_pairs(body, std::max<std::size_t>(pair_budget - pairs.size(), pair_budget / 2),
                           seed + 17);
  pairs.insert(pairs.end(), local.begin(), local.end());
  std::sort(pairs.begin(), pairs.end(),
            [](const NormalPair& a, const NormalPair& b) { return a.dist < b.dist; });

  ConeParams cp;
  cp.theta = theta;
  cp.pairs_used = pairs.size();
  cp.conerad = pairs.back().dist;
  double running = 0;
  for (const auto& p : pairs) {
    if (p.gap >= thr) {
      cp.conerad = p.dist;
      break;
    }
    running = std::max(running, p.gap);
  }
  // Sampled modulus table (running maximum over strictly shorter separations).
  const double diam = body.diam();
  running = 0;
  std::size_t cursor = 0;
  for (int s = 0; s <= 32; ++s) {
    double r = diam * std::pow(10.0, -4.0 + 4.0 * s / 32.0);
    while (cursor < pairs.size() && pairs[cursor].dist < r) running = std::max(running, pairs[cursor++].gap);
    cp.modulus.emplace_back(r, running);
  }

  // Independent verification pool; any violating pair shrinks the radius.
  auto check = local_pairs(body, 4000, seed + 991);
  std::sort(check.begin(), check.end(),
            [](const NormalPair& a, const NormalPair& b) { return a.dist < b.dist; });
  cp.verified = true;
  for (const auto& p : check) {
    if (p.dist >= cp.conerad) break;
    ++cp.verification_pairs;
    if (1 - 0.5 * p.gap * p.gap <= theta) {
      cp.conerad = p.dist;
      cp.verified = false;
      break;
    }
  }
  cp.conerad_safe = kConeradSafety * cp.conerad;
  cp.warning = "sampled modulus underestimates the true modulus; conerad is biased upward";
  if (!cp.verified) cp.warning += "; verification pool shrank the estimate";
  return cp;
}

ConeCheck cone_inclusion_check(const ConvexBody& body, const Vec& x0, double theta,
                               double cone_radius, std::size_t samples, std::uint64_t seed) {
  if (!body.is_c1()) throw Error(ErrorCode::NotC1, "cone inclusion requires a C1 body");
  NormalQuery q = body.normal(x0);
  if (q.non_unique) throw Error(ErrorCode::NotC1, "cone inclusion at a kink");
  const Frame f = tangent_frame(body.dim(), q.normal);
  // Cone of axis -N whose half-angle has cosine sqrt(1 - theta^2).
  const double half_angle = std::acos(std::sqrt(std::max(0.0, 1 - theta * theta)));
  const double tol = 1e-8 * body.diam();
  Rng rng(seed);
  ConeCheck out;
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    // Every fourth sample sits on the lateral surface, every third on the outer sphere.
    double a = (s % 4 == 0) ? half_angle : half_angle * std::sqrt(rng.uniform());
    double r = (s % 3 == 0) ? cone_radius : cone_radius * rng.uniform();
    double b = rng.uniform(0, 2 * M_PI);
    Vec side = body.dim() == 2 ? Vec(std::cos(b) * f.t1 + std::sin(b) * f.t2)
                               : Vec((b < M_PI ? 1.0 : -1.0) * f.t1);
    Vec dir = std::cos(a) * (-q.normal) + std::sin(a) * side;
    double lv = body.level(x0 + r * dir);
    out.worst_margin = std::max(out.worst_margin, lv);
    ++out.samples;
  }
  out.pass = out.worst_margin <= tol;
  return out;
}

BodyMetrics body_metrics(const ConvexBody& body, std::size_t samples, std::uint64_t seed, int knn) {
  BodyMetrics bm;
  bm.diam = body.metrics().diam;
  bm.inradius = body.metrics().inradius;
  bm.outradius = body.metrics().outradius;
  BoundarySample bs = quasi_uniform_boundary(body, samples, seed);
  std::vector<Vec> pts;
  for (const auto& p : bs.points) pts.push_back(p.x);
  KnnGraph g = knn_graph(pts, knn);
  if (!g.connected()) throw Error(ErrorCode::InsufficientSamples, "surface graph is disconnected");
  bm.samples = pts.size();
  const std::size_t sources = std::min<std::size_t>(pts.size(), 300);
  const std::size_t stride = pts.size() / sources;
  // Graph distances overestimate geodesics at the sample scale; skip pairs that short.
  double spacing = 0;
  for (const auto& nb : g.adj) {
    double m = std::numeric_limits<double>::infinity();
    for (auto [j, len] : nb) m = std::min(m, len);
    spacing += m;
  }
  spacing /= static_cast<double>(pts.size());
  const double short_cut = 5 * spacing;
  double cgeo = 1.0, lip = 1.0;
  for (std::size_t s = 0; s < sources; ++s) {
    const int i = static_cast<int>(s * stride);
    auto dist = g.dijkstra(i);
    const Vec ui = pts[i].normalized();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (static_cast<int>(j) == i) continue;
      double eu = (pts[i] - pts[j]).norm();
      double sph = std::acos(std::clamp(ui.dot(pts[j].normalized()), -1.0, 1.0));
      if (sph > 1e-9) lip = std::max(lip, eu / sph);
      if (eu < short_cut) continue;
      cgeo = std::max(cgeo, dist[j] / eu);
      lip = std::max({lip, sph / dist[j], dist[j] / sph});
    }
  }
  bm.geodesic_constant = cgeo;
  bm.radial_lipschitz = lip;
  return bm;
}

HausdorffResult hausdorff_distance(const ConvexBody& a, const ConvexBody& b, std::size_t samples) {
  // For convex bodies the two-sided sup-inf distance equals the sup of support-function gaps.
  auto dirs = direction_grid(std::max(a.dim(), b.dim()), samples, 3);
  HausdorffResult r;
  for (const auto& u : dirs) r.distance = std::max(r.distance, std::abs(a.support(u) - b.support(u)));
  r.samples = dirs.size();
  return r;
}

}  // namespace otsurf
