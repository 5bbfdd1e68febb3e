#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "otsurf/random.hpp"
#include "shape_impl.hpp"

namespace otsurf {

constexpr int kLloydSteps = 10;

std::vector<Vec> direction_grid(int n, std::size_t count, std::uint64_t seed) {
  std::vector<Vec> out(count);
  Rng rng(seed);
  if (n == 1) {
    double offset = rng.uniform();
    for (std::size_t k = 0; k < count; ++k) {
      double a = 2 * M_PI * (static_cast<double>(k) + offset) / static_cast<double>(count);
      out[k] = Vec(std::cos(a), std::sin(a), 0);
    }
    return out;
  }
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  const Eigen::Matrix3d rot = q.toRotationMatrix();
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < count; ++k) {
    double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
    double r = std::sqrt(std::max(0.0, 1 - z * z));
    double phi = golden * static_cast<double>(k);
    out[k] = rot * Vec(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

namespace {

// Uniform hash grid over site positions for nearest-site queries.
class SiteGrid {
 public:
  SiteGrid(const std::vector<Vec>& sites, double cell) : sites_(sites), cell_(cell) {
    lo_ = sites[0];
    Vec hi = sites[0];
    for (const auto& p : sites) lo_ = lo_.cwiseMin(p), hi = hi.cwiseMax(p);
    for (int d = 0; d < 3; ++d) dims_[d] = std::max(1, static_cast<int>((hi[d] - lo_[d]) / cell_) + 1);
    buckets_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], {});
    for (std::size_t s = 0; s < sites.size(); ++s) buckets_[key(index(sites[s]))].push_back(static_cast<int>(s));
  }

  int nearest(const Vec& p) const {
    const auto c = index(p);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    const int reach = std::max({dims_[0], dims_[1], dims_[2]});
    for (int ring = 0; ring <= reach; ++ring) {
      // Every point in ring r or beyond is at least (r - 1) cells away.
      if (best >= 0 && (ring - 1) * cell_ > std::sqrt(best_d)) break;
      for (int i = c[0] - ring; i <= c[0] + ring; ++i)
        for (int j = c[1] - ring; j <= c[1] + ring; ++j)
          for (int k = c[2] - ring; k <= c[2] + ring; ++k) {
            if (std::max({std::abs(i - c[0]), std::abs(j - c[1]), std::abs(k - c[2])}) != ring) continue;
            if (i < 0 || j < 0 || k < 0 || i >= dims_[0] || j >= dims_[1] || k >= dims_[2]) continue;
            for (int s : buckets_[key({i, j, k})]) {
              const double d = (sites_[s] - p).squaredNorm();
              if (d < best_d) best_d = d, best = s;
            }
          }
    }
    return best;
  }

 private:
  std::array<int, 3> index(const Vec& p) const {
    std::array<int, 3> c{};
    for (int d = 0; d < 3; ++d) c[d] = std::clamp(static_cast<int>((p[d] - lo_[d]) / cell_), 0, dims_[d] - 1);
    return c;
  }
  std::size_t key(const std::array<int, 3>& c) const {
    return (static_cast<std::size_t>(c[0]) * dims_[1] + c[1]) * dims_[2] + c[2];
  }

  const std::vector<Vec>& sites_;
  double cell_;
  Vec lo_;
  std::array<int, 3> dims_{};
  std::vector<std::vector<int>> buckets_;
};

// Curves: points at equal arc length along a dense polyline in angular order, each carrying
// the same share of the perimeter.
BoundarySample equal_arc_boundary(const ConvexBody& body, std::size_t count, std::uint64_t seed) {
  const std::size_t m = 64 * count;
  const double phase = Rng(seed).uniform();
  std::vector<Vec> poly(m + 1);
  for (std::size_t c = 0; c <= m; ++c) {
    const double a = 2 * M_PI * static_cast<double>(c) / static_cast<double>(m);
    poly[c] = body.boundary_along(Vec(std::cos(a), std::sin(a), 0)).x;
  }
  std::vector<double> arc(m + 1, 0.0);
  for (std::size_t c = 1; c <= m; ++c) arc[c] = arc[c - 1] + (poly[c] - poly[c - 1]).norm();
  const double length = arc[m];
  BoundarySample out;
  out.points.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = length * (static_cast<double>(k) + phase) / static_cast<double>(count);
    while (seg + 1 < m && arc[seg + 1] < target) ++seg;
    const double t = (target - arc[seg]) / std::max(arc[seg + 1] - arc[seg], 1e-300);
    const double a = 2 * M_PI * (static_cast<double>(seg) + t) / static_cast<double>(m);
    out.points.push_back(body.boundary_along(Vec(std::cos(a), std::sin(a), 0)));
  }
  out.weights.assign(count, length / static_cast<double>(count));
  return out;
}

}  // namespace

BoundarySample quasi_uniform_boundary(const ConvexBody& body, std::size_t count,
                                      std::uint64_t seed) {
  const int n = body.dim();
  if (n == 1) return equal_arc_boundary(body, count, seed);
  const double sphere_measure = 4 * M_PI;

  auto candidates = [&](std::size_t m, std::vector<SurfacePoint>& pts, std::vector<double>& w) {
    auto dirs = direction_grid(n, m, seed);
    pts.resize(m);
    w.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
      pts[c] = body.boundary_along(dirs[c]);
      double rho = pts[c].x.norm();
      double jac = std::pow(rho, n) / std::max(dirs[c].dot(pts[c].normal), 1e-12);
      w[c] = jac * sphere_measure / static_cast<double>(m);
    }
  };

  std::vector<SurfacePoint> cand;
  std::vector<double> cw;
  std::size_t factor = 8;
  candidates(factor * count, cand, cw);
  // Sparse candidate regions need a larger pool for an even selection.
  double wmax = *std::max_element(cw.begin(), cw.end());
  double wmean = std::accumulate(cw.begin(), cw.end(), 0.0) / static_cast<double>(cw.size());
  std::size_t need = static_cast<std::size_t>(std::ceil(4.0 * wmax / wmean));
  if (need > factor) {
    factor = std::min<std::size_t>(need, 64);
    candidates(factor * count, cand, cw);
  }

  const std::size_t m = cand.size();
  std::vector<double> mind(m, std::numeric_limits<double>::infinity());
  std::vector<int> owner(m, 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  std::size_t next = 0;
  for (std::size_t s = 0; s < count; ++s) {
    chosen.push_back(next);
    const Vec& p = cand[next].x;
    double best = -1;
    std::size_t arg = 0;
    for (std::size_t c = 0; c < m; ++c) {
      double d = (cand[c].x - p).squaredNorm();
      if (d < mind[c]) {
        mind[c] = d;
        owner[c] = static_cast<int>(s);
      }
      if (mind[c] > best) {
        best = mind[c];
        arg = c;
      }
    }
    next = arg;
  }

  // Farthest-point selection stops part way through a refinement level, leaving neighbouring
  // gaps that differ by up to a factor 2. Discrete Lloyd steps on the candidate pool even them out.
  double area = std::accumulate(cw.begin(), cw.end(), 0.0);
  const double cell = n == 1 ? area / static_cast<double>(count) : std::sqrt(area / static_cast<double>(count));
  for (int iter = 0; iter < kLloydSteps; ++iter) {
    std::vector<Vec> sites(count);
    for (std::size_t s = 0; s < count; ++s) sites[s] = cand[chosen[s]].x;
    const SiteGrid grid(sites, cell);
    for (std::size_t c = 0; c < m; ++c) owner[c] = grid.nearest(cand[c].x);
    std::vector<Vec> centroid(count, Vec::Zero());
    std::vector<double> mass(count, 0.0);
    for (std::size_t c = 0; c < m; ++c) centroid[owner[c]] += cw[c] * cand[c].x, mass[owner[c]] += cw[c];
    std::vector<double> best(count, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> moved(chosen);
    for (std::size_t c = 0; c < m; ++c) {
      const int s = owner[c];
      const double d = (cand[c].x - centroid[s] / mass[s]).squaredNorm();
      if (d < best[s]) best[s] = d, moved[s] = c;
    }
    chosen = moved;
  }
  {
    std::vector<Vec> sites(count);
    for (std::size_t s = 0; s < count; ++s) sites[s] = cand[chosen[s]].x;
    const SiteGrid grid(sites, cell);
    for (std::size_t c = 0; c < m; ++c) owner[c] = grid.nearest(cand[c].x);
  }

  BoundarySample out;
  out.points.reserve(count);
  for (std::size_t idx : chosen) out.points.push_back(cand[idx]);
  out.weights.assign(count, 0.0);
  for (std::size_t c = 0; c < m; ++c) out.weights[owner[c]] += cw[c];
  return out;
}

KnnGraph knn_graph(const std::vector<Vec>& points, int k) {
  const int n = static_cast<int>(points.size());
  KnnGraph g;
  g.adj.assign(n, {});
  std::vector<std::pair<double, int>> buf;
  std::vector<std::vector<int>> nbr(n);
  for (int i = 0; i < n; ++i) {
    buf.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) buf.emplace_back((points[i] - points[j]).squaredNorm(), j);
    int kk = std::min(k, n - 1);
    std::partial_sort(buf.begin(), buf.begin() + kk, buf.end());
    for (int t = 0; t < kk; ++t) nbr[i].push_back(buf[t].second);
  }
  for (int i = 0; i < n; ++i) {
    for (int j : nbr[i]) {
      double d = (points[i] - points[j]).norm();
      auto has = [&](int a, int b) {
        for (auto& e : g.adj[a])
          if (e.first == b) return true;
        return false;
      };
      if (!has(i, j)) g.adj[i].emplace_back(j, d);
      if (!has(j, i)) g.adj[j].emplace_back(i, d);
    }
  }
  return g;
}

std::vector<double> KnnGraph::dijkstra(int source) const {
  std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [w, len] : adj[v]) {
      double nd = d + len;
      if (nd < dist[w]) {
        dist[w] = nd;
        pq.emplace(nd, w);
      }
    }
  }
  return dist;
}

bool KnnGraph::connected() const {
  if (adj.empty()) return true;
  auto d = dijkstra(0);
  return std::all_of(d.begin(), d.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace otsurf
