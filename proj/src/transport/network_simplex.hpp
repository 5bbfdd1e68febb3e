#pragma once

#include <cstdint>
#include <vector>

#include "otsurf/geometry.hpp"

namespace otsurf::detail {

struct SimplexArc {
  int source = 0;
  int target = 0;
  std::int64_t flow = 0;
};

struct SimplexSolution {
  std::vector<SimplexArc> basis;   // spanning tree, N + M - 1 arcs
  std::vector<double> source_pot;  // a_i with a_i + b_j = c_ij on the basis
  std::vector<double> target_pot;
  std::size_t pivots = 0;
  std::size_t degenerate_arcs = 0;
};

// Uncapacitated transportation problem with integer supplies and demands of equal total and
// cost |x - y|^2 / 2 evaluated on demand.
SimplexSolution transport_simplex(const std::vector<Vec>& xs, const std::vector<std::int64_t>& supply,
                                  const std::vector<Vec>& ys, const std::vector<std::int64_t>& demand);

// Largest-remainder rounding of nonnegative weights to integers summing to total.
std::vector<std::int64_t> integer_masses(const std::vector<double>& w, std::int64_t total);

}  // namespace otsurf::detail
