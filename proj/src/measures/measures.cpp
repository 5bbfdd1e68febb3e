#include "otsurf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace otsurf {

double SurfaceSampling::total_area() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::vector<Vec> SurfaceSampling::positions() const {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.x);
  return out;
}

double SurfaceSampling::spacing() const {
  if (points.size() < 2) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j)
      if (j != i) best = std::min(best, (points[i].x - points[j].x).squaredNorm());
    sum += std::sqrt(best);
  }
  return sum / static_cast<double>(points.size());
}

SamplingPtr sample_surface(const ConvexBody& body, std::size_t count, std::uint64_t seed) {
  if (count < 16) throw Error(ErrorCode::InsufficientSamples, "sampling needs at least 16 points");
  BoundarySample bs = quasi_uniform_boundary(body, count, seed);
  return std::make_shared<const SurfaceSampling>(
      SurfaceSampling{body, std::move(bs.points), std::move(bs.weights), seed});
}

SamplingPtr patch_sampling(const ConvexBody& body, const Vec& base, double radius, std::size_t count) {
  if (count < 16) throw Error(ErrorCode::InsufficientSamples, "patch needs at least 16 points");
  const TangentChart chart = chart_at(body, base);
  const int n = body.dim();
  auto s = std::make_shared<SurfaceSampling>(SurfaceSampling{body, {}, {}, 0});
  // Square grid of the disc (n = 2) or segment (n = 1) with about `count` cells.
  const double step = n == 1 ? 2 * radius / static_cast<double>(count)
                             : radius * std::sqrt(M_PI / static_cast<double>(count));
  const int half = static_cast<int>(std::ceil(radius / step));
  const double cell = n == 1 ? step : step * step;
  for (int a = -half; a <= half; ++a) {
    for (int b = (n == 1 ? 0 : -half); b <= (n == 1 ? 0 : half); ++b) {
      Tan p(a * step, b * step);
      if (p.norm() > radius) continue;
      if (!chart.in_domain(p)) continue;
      SurfacePoint q = c_exp(chart, p);
      double tilt = q.normal.dot(chart.base().normal);
      if (!(tilt > 0)) continue;
      s->weights.push_back(cell / tilt);
      s->points.push_back(q);
    }
  }
  if (s->points.size() < 16) throw Error(ErrorCode::InsufficientSamples, "patch too small");
  return s;
}

DensitySpec DensitySpec::uniform() { return {}; }

DensitySpec DensitySpec::two_sided(double upper, double lower, const Vec& axis) {
  DensitySpec d;
  d.kind = Kind::TwoSided;
  d.upper = upper;
  d.lower = lower;
  d.axis = axis.normalized();
  return d;
}

DensitySpec DensitySpec::custom(std::function<double(const SurfacePoint&)> fn) {
  DensitySpec d;
  d.kind = Kind::Custom;
  d.fn = std::move(fn);
  return d;
}

double DensitySpec::operator()(const SurfacePoint& p) const {
  switch (kind) {
    case Kind::Uniform: return 1.0;
    case Kind::TwoSided: return p.x.dot(axis) >= 0 ? upper : lower;
    case Kind::Custom: return fn(p);
  }
  return 1.0;
}

double DiscreteMeasure::density_min() const {
  return density.empty() ? 0.0 : *std::min_element(density.begin(), density.end());
}

double DiscreteMeasure::density_max() const {
  return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
}

DiscreteMeasure measure_from_masses(SamplingPtr sampling, std::vector<double> mass) {
  if (mass.size() != sampling->size())
    throw Error(ErrorCode::InvalidArgument, "mass vector does not match the sampling");
  // Compensated summation keeps the normalized total within a few ulps of 1.
  double total = 0, comp = 0;
  for (double m : mass) {
    if (!(m >= 0) || !std::isfinite(m)) throw Error(ErrorCode::NonPositiveDensity, "negative mass");
    double y = m - comp, t = total + y;
    comp = (t - total) - y;
    total = t;
  }
  if (!(total > 0)) throw Error(ErrorCode::NonPositiveDensity, "zero total mass");
  DiscreteMeasure out;
  out.sampling = std::move(sampling);
  out.mass = std::move(mass);
  out.density.resize(out.mass.size());
  for (std::size_t i = 0; i < out.mass.size(); ++i) {
    out.mass[i] /= total;
    out.density[i] = out.mass[i] / out.sampling->weights[i];
  }
  return out;
}

DiscreteMeasure make_measure(SamplingPtr sampling, const DensitySpec& density) {
  std::vector<double> mass(sampling->size());
  for (std::size_t i = 0; i < mass.size(); ++i) {
    double rho = density(sampling->points[i]);
    if (!(rho > 0) || !std::isfinite(rho))
      throw Error(ErrorCode::NonPositiveDensity, "density must be positive at every sample");
    mass[i] = rho * sampling->weights[i];
  }
  return measure_from_masses(std::move(sampling), std::move(mass));
}

namespace {

// Area element of the boundary per unit solid angle along the ray through p.
double radial_jacobian(int n, const SurfacePoint& p) {
  const double rho = p.x.norm();
  const Vec dir = p.x / rho;
  return std::pow(rho, n) / std::max(dir.dot(p.normal), 1e-12);
}

}  // namespace

PushforwardResult pushforward_radial(const DiscreteMeasure& source, const ConvexBody& target,
                                     double lipschitz) {
  const ConvexBody& body = source.sampling->body;
  if (!(body.level(Vec::Zero()) < 0) || !(target.level(Vec::Zero()) < 0))
    throw Error(ErrorCode::OriginNotInterior, "radial projection needs the origin inside both bodies");
  if (body.dim() != target.dim()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const int n = body.dim();
  auto mapped = std::make_shared<SurfaceSampling>(SurfaceSampling{target, {}, {}, source.sampling->seed});
  mapped->points.reserve(source.size());
  mapped->weights.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const SurfacePoint& p = source.sampling->points[i];
    SurfacePoint q = target.boundary_along(p.x.normalized());
    mapped->weights.push_back(source.sampling->weights[i] * radial_jacobian(n, q) /
                              radial_jacobian(n, p));
    mapped->points.push_back(q);
  }
  PushforwardResult r;
  r.lipschitz = std::max(lipschitz, 1.0);
  r.measure.sampling = mapped;
  r.measure.mass = source.mass;
  r.measure.density.resize(source.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    r.measure.density[i] = r.measure.mass[i] / mapped->weights[i];
  const double scale = std::pow(r.lipschitz, 2 * n);
  r.lower_bound = source.density_min() / scale / kPushforwardSlack;
  r.upper_bound = source.density_max() * scale * kPushforwardSlack;
  r.bounds_hold = r.measure.density_min() >= r.lower_bound && r.measure.density_max() <= r.upper_bound;
  return r;
}

Vec lens_axis(int n) { return n == 1 ? Vec::UnitY() : Vec::UnitZ(); }

LensScenario lens_scenario(int n, double cap_radius, double delta, int k, std::size_t count,
                           std::uint64_t seed) {
  if (!(delta > 0 && delta <= 0.2)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 0.2]");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const ConvexBody body = ConvexBody::lens(n, cap_radius);
  const Vec axis = lens_axis(n);
  SamplingPtr s = sample_surface(body, count, seed);

  LensScenario out;
  // Opposite caps must have obtuse normals; the rim belongs to the upper side.
  double prod = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> up, down;
  for (std::size_t i = 0; i < s->size(); ++i)
    (s->points[i].x.dot(axis) >= 0 ? up : down).push_back(i);
  for (std::size_t a : up) {
    if (s->points[a].non_unique) continue;
    for (std::size_t b : down) prod = std::max(prod, s->points[a].normal.dot(s->points[b].normal));
  }
  out.normal_product_max = prod;
  if (!(prod < 0))
    throw Error(ErrorCode::NormalProductNonNegative, "cross-side normals are not obtuse");

  double area_up = 0;
  for (std::size_t i : up) area_up += s->weights[i];
  const double frac_up = area_up / s->total_area();
  out.upper_fraction = frac_up;
  // Densities are taken relative to the normalized area so that the two-sided family is valid
  // for any cap radius.
  const double c = (1 - delta * (1 - frac_up)) / frac_up + delta;
  const double d_bar = (1 + 1.0 / k) * delta;
  out.mu = make_measure(s, DensitySpec::two_sided(c - delta, delta, axis));
  out.mu_bar = make_measure(s, DensitySpec::two_sided(c - d_bar, d_bar, axis));
  double top_mu = 0, top_bar = 0;
  for (std::size_t i : up) {
    top_mu += out.mu.mass[i];
    top_bar += out.mu_bar.mass[i];
  }
  out.deficit = top_mu - top_bar;
  return out;
}

void write_measure_csv(const std::string& path, const DiscreteMeasure& measure) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  const int n = measure.sampling->body.dim();
  f << std::setprecision(17);
  f << (n == 1 ? "x,y,nx,ny,weight,mass\n" : "x,y,z,nx,ny,nz,weight,mass\n");
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const auto& p = measure.sampling->points[i];
    for (int d = 0; d <= n; ++d) f << p.x[d] << ',';
    for (int d = 0; d <= n; ++d) f << p.normal[d] << ',';
    f << measure.sampling->weights[i] << ',' << measure.mass[i] << '\n';
  }
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

DiscreteMeasure read_measure_csv(const std::string& path, const ConvexBody& body) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  const int n = body.dim();
  auto s = std::make_shared<SurfaceSampling>(SurfaceSampling{body, {}, {}, 0});
  std::vector<double> mass;
  std::string line;
  std::getline(f, line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != static_cast<std::size_t>(2 * (n + 1) + 2))
      throw Error(ErrorCode::IoError, "malformed measure row in " + path);
    SurfacePoint p;
    for (int d = 0; d <= n; ++d) {
      p.x[d] = v[d];
      p.normal[d] = v[n + 1 + d];
    }
    p.chart = body.chart_id(p.x);
    s->points.push_back(p);
    s->weights.push_back(v[2 * (n + 1)]);
    mass.push_back(v[2 * (n + 1) + 1]);
  }
  return measure_from_masses(std::move(s), std::move(mass));
}

}  // namespace otsurf
