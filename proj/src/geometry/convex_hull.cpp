#include "convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace otsurf {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  if (idx.size() < 3) return idx;
  std::vector<int> hull(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross2(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0) --k;
    hull[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    int i = idx[t];
    while (k >= lower && cross2(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0) --k;
    hull[k++] = i;
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<Vec>& pts) {
  const int m = static_cast<int>(pts.size());
  if (m < 4) throw Error(ErrorCode::InvalidArgument, "3-D hull needs at least 4 points");
  double scale = 0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * std::max(scale, 1.0);

  // Initial tetrahedron from extreme, well-separated points.
  int a = 0, b = 0;
  for (int i = 1; i < m; ++i)
    if (pts[i].x() < pts[a].x()) a = i;
  for (int i = 0; i < m; ++i)
    if ((pts[i] - pts[a]).norm() > (pts[b] - pts[a]).norm()) b = i;
  int c = -1;
  double best = 0;
  for (int i = 0; i < m; ++i) {
    double area = (pts[b] - pts[a]).cross(pts[i] - pts[a]).norm();
    if (area > best) best = area, c = i;
  }
  int d = -1;
  Vec nrm = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  best = 0;
  for (int i = 0; i < m; ++i) {
    double vol = std::abs(nrm.dot(pts[i] - pts[a]));
    if (vol > best) best = vol, d = i;
  }
  if (c < 0 || d < 0 || best <= eps * nrm.norm())
    throw Error(ErrorCode::InvalidArgument, "3-D hull input is degenerate");

  struct Face {
    std::array<int, 3> v;
    Vec normal;
    double offset;
    bool alive;
  };
  std::vector<Face> faces;
  const Vec centroid = (pts[a] + pts[b] + pts[c] + pts[d]) / 4.0;
  auto add_face = [&](int i, int j, int k) {
    Vec nn = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
    double len = nn.norm();
    if (len > 0) nn /= len;
    if (nn.dot(centroid - pts[i]) > 0) {
      std::swap(j, k);
      nn = -nn;
    }
    faces.push_back({{i, j, k}, nn, nn.dot(pts[i]), true});
  };
  add_face(a, b, c);
  add_face(a, b, d);
  add_face(a, c, d);
  add_face(b, c, d);

  std::vector<int> order;
  order.reserve(m);
  for (int i = 0; i < m; ++i)
    if (i != a && i != b && i != c && i != d) order.push_back(i);

  std::unordered_set<std::uint64_t> visible_edges;
  std::vector<int> visible;
  for (int p : order) {
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (!faces[f].alive) continue;
      if (faces[f].normal.dot(pts[p]) - faces[f].offset > eps) visible.push_back(f);
    }
    if (visible.empty()) continue;
    visible_edges.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) visible_edges.insert(edge_key(v[e], v[(e + 1) % 3]));
    }
    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        int s = v[e], t = v[(e + 1) % 3];
        if (!visible_edges.count(edge_key(t, s))) horizon.emplace_back(s, t);
      }
      faces[f].alive = false;
    }
    for (auto [s, t] : horizon) {
      Vec nn = (pts[t] - pts[s]).cross(pts[p] - pts[s]);
      double len = nn.norm();
      if (len > 0) nn /= len;
      faces.push_back({{s, t, p}, nn, nn.dot(pts[s]), true});
    }
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& f : faces)
    if (f.alive) out.push_back(f.v);
  return out;
}

}  // namespace otsurf
