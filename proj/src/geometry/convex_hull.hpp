#pragma once

#include <array>
#include <vector>

#include "otsurf/geometry.hpp"

namespace otsurf {

// Counter-clockwise hull of planar points (x, y); returns vertex indices.
std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& pts);

// Outward-oriented triangular facets of the 3-D hull; input must not be degenerate.
std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<Vec>& pts);

}  // namespace otsurf
