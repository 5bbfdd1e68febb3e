#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "otsurf/geometry.hpp"

namespace otsurf {

// Boundary points with positive area weights; deterministic per seed.
struct SurfaceSampling {
  ConvexBody body;
  std::vector<SurfacePoint> points;
  std::vector<double> weights;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  double total_area() const;
  std::vector<Vec> positions() const;
  // Mean distance to the nearest other sample.
  double spacing() const;
};

using SamplingPtr = std::shared_ptr<const SurfaceSampling>;

// Requires count >= 16.
SamplingPtr sample_surface(const ConvexBody& body, std::size_t count, std::uint64_t seed);

// Dense sampling of the chart graph over a tangent disc of the given radius at base; the
// weights are the tangent cell areas divided by <N, N_base>.
SamplingPtr patch_sampling(const ConvexBody& body, const Vec& base, double radius, std::size_t count);

struct DensitySpec {
  enum class Kind { Uniform, TwoSided, Custom };
  Kind kind = Kind::Uniform;
  // Two-sided: `upper` where <X, axis> >= 0 (ties go up), `lower` elsewhere.
  double upper = 1.0;
  double lower = 1.0;
  Vec axis = Vec::UnitZ();
  std::function<double(const SurfacePoint&)> fn;

  static DensitySpec uniform();
  static DensitySpec two_sided(double upper, double lower, const Vec& axis);
  static DensitySpec custom(std::function<double(const SurfacePoint&)> fn);
  double operator()(const SurfacePoint& p) const;
};

// Probability measure on a sampling; density[i] = mass[i] / weight[i].
struct DiscreteMeasure {
  SamplingPtr sampling;
  std::vector<double> mass;
  std::vector<double> density;

  std::size_t size() const { return mass.size(); }
  const Vec& point(std::size_t i) const { return sampling->points[i].x; }
  double density_min() const;
  double density_max() const;
};

DiscreteMeasure make_measure(SamplingPtr sampling, const DensitySpec& density);

// Same points and masses with densities from explicit masses (renormalized).
DiscreteMeasure measure_from_masses(SamplingPtr sampling, std::vector<double> mass);

struct PushforwardResult {
  DiscreteMeasure measure;
  double lipschitz = 1.0;  // radial-projection constant used for the density bounds
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool bounds_hold = true;
};

inline constexpr double kPushforwardSlack = 1.1;

// Carries each sample along its ray onto the target boundary; masses are unchanged.
PushforwardResult pushforward_radial(const DiscreteMeasure& source, const ConvexBody& target,
                                     double lipschitz);

// Unit vector along the lens axis for dimension n.
Vec lens_axis(int n);

struct LensScenario {
  DiscreteMeasure mu;
  DiscreteMeasure mu_bar;
  double deficit = 0.0;            // mu(top) - mu_bar(top)
  double upper_fraction = 0.0;     // sampled area fraction of the upper cap
  double normal_product_max = 0.0; // max <q+, q-> over cross-side sample pairs
};

LensScenario lens_scenario(int n, double cap_radius, double delta, int k, std::size_t count,
                           std::uint64_t seed);

void write_measure_csv(const std::string& path, const DiscreteMeasure& measure);
// Reads points, normals, weights and masses written by write_measure_csv.
DiscreteMeasure read_measure_csv(const std::string& path, const ConvexBody& body);

}  // namespace otsurf
