#include "planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "../geometry/convex_hull.hpp"

namespace otsurf::detail {

namespace {

double cross(const Tan& a, const Tan& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

TangentHull::TangentHull(int n, const std::vector<Tan>& pts) : n_(n) {
  if (pts.empty()) return;
  if (n == 1) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : pts) lo = std::min(lo, p.x()), hi = std::max(hi, p.x());
    vertices_ = {Tan(lo, 0), Tan(hi, 0)};
    return;
  }
  if (pts.size() < 3) {
    vertices_ = pts;
    return;
  }
  for (int i : convex_hull_2d(pts)) vertices_.push_back(pts[i]);
}

bool TangentHull::contains(const Tan& p, double tol) const {
  if (vertices_.empty()) return false;
  if (n_ == 1) return p.x() >= vertices_[0].x() - tol && p.x() <= vertices_[1].x() + tol;
  if (vertices_.size() < 3) return false;
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const Tan& a = vertices_[k];
    const Tan& b = vertices_[(k + 1) % vertices_.size()];
    const Tan e = b - a;
    if (cross(e, p - a) < -tol * e.norm()) return false;
  }
  return true;
}

Tan TangentHull::centroid() const {
  if (n_ == 1 || vertices_.size() < 3) {
    Tan c = Tan::Zero();
    for (const auto& v : vertices_) c += v;
    return vertices_.empty() ? c : Tan(c / static_cast<double>(vertices_.size()));
  }
  // Area-weighted fan triangulation about the first vertex.
  double area = 0;
  Tan c = Tan::Zero();
  for (std::size_t k = 1; k + 1 < vertices_.size(); ++k) {
    double a = 0.5 * cross(vertices_[k] - vertices_[0], vertices_[k + 1] - vertices_[0]);
    area += a;
    c += a * (vertices_[0] + vertices_[k] + vertices_[k + 1]) / 3.0;
  }
  return area > 0 ? Tan(c / area) : vertices_[0];
}

double TangentHull::support(const Tan& w) const {
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_) s = std::max(s, v.dot(w));
  return s;
}

double TangentHull::max_chord(const Tan& w) const {
  if (vertices_.empty()) return 0.0;
  if (n_ == 1) return vertices_[1].x() - vertices_[0].x();
  if (vertices_.size() < 3) return 0.0;
  const Tan d = w.normalized();
  const Tan perp(-d.y(), d.x());
  // The chord length is concave in the offset; it peaks at a vertex offset.
  double best = 0;
  for (const auto& v : vertices_) {
    const double off = v.dot(perp);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < vertices_.size(); ++k) {
      const Tan& a = vertices_[k];
      const Tan& b = vertices_[(k + 1) % vertices_.size()];
      const double sa = a.dot(perp) - off, sb = b.dot(perp) - off;
      if ((sa > 0 && sb > 0) || (sa < 0 && sb < 0)) continue;
      if (sa == sb) {
        lo = std::min({lo, a.dot(d), b.dot(d)});
        hi = std::max({hi, a.dot(d), b.dot(d)});
        continue;
      }
      const Tan q = a + (sa / (sa - sb)) * (b - a);
      lo = std::min(lo, q.dot(d));
      hi = std::max(hi, q.dot(d));
    }
    if (hi > lo) best = std::max(best, hi - lo);
  }
  return best;
}

TangentHull TangentHull::dilate(const Tan& c, double s) const {
  TangentHull out;
  out.n_ = n_;
  for (const auto& v : vertices_) out.vertices_.push_back(c + s * (v - c));
  return out;
}

}  // namespace otsurf::detail
