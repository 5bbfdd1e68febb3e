#pragma once

#include <vector>

#include "otsurf/geometry.hpp"

namespace otsurf::detail {

// Convex region in tangent coordinates: a polygon for n == 2, an interval on the first axis
// for n == 1. Built from a point cloud by taking its hull.
class TangentHull {
 public:
  TangentHull(int n, const std::vector<Tan>& pts);

  bool empty() const { return vertices_.empty(); }
  bool contains(const Tan& p, double tol = 1e-12) const;
  Tan centroid() const;
  double support(const Tan& w) const;
  // Longest intersection of the region with a line parallel to w.
  double max_chord(const Tan& w) const;
  // The region scaled by s about c.
  TangentHull dilate(const Tan& c, double s) const;
  const std::vector<Tan>& vertices() const { return vertices_; }

 private:
  TangentHull() = default;
  int n_ = 2;
  std::vector<Tan> vertices_;  // counter-clockwise; two endpoints when n == 1
};

}  // namespace otsurf::detail
