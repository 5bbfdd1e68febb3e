#pragma once

#include <cstdint>

#include "otsurf/cli.hpp"

namespace otsurf::detail {

// Source and target measures on one shared sampling, with the solved plan.
struct Instance {
  SamplingPtr sampling;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  TransportResult result;
};

inline Instance make_instance(const ConvexBody& body, std::size_t count, std::uint64_t seed,
                              const MeasureConfig& source, const MeasureConfig& target, const SolverConfig& solver) {
  Instance in;
  in.sampling = sample_surface(body, count, seed);
  in.mu = make_measure(in.sampling, source.spec(body.dim()));
  in.nu = make_measure(in.sampling, target.spec(body.dim()));
  in.result = solver.solve(in.mu, in.nu);
  return in;
}

// A fixed generic boundary point, away from the symmetry planes of the built-in shapes.
inline Vec generic_point(const ConvexBody& body) {
  const Vec dir = body.dim() == 1 ? Vec(0.6, 0.8, 0.0) : Vec(0.3, 0.4, 0.866).normalized();
  return body.boundary_along(dir).x;
}

}  // namespace otsurf::detail
