#include <algorithm>
#include <cmath>
#include <limits>

#include "otsurf/theory.hpp"
#include "planar.hpp"

namespace otsurf {

using detail::TangentHull;

SectionSpec SectionSpec::through(const Vec& x0, double u_x0, const Vec& slope, double h) {
  SectionSpec s;
  s.slope = slope;
  s.height_offset = u_x0 + h + cost(x0, slope);
  return s;
}

Section section_extract(const SurfaceSampling& sampling, const std::vector<double>& u,
                        const SectionSpec& spec) {
  if (u.size() != sampling.size()) throw Error(ErrorCode::InvalidArgument, "potential and sampling differ in size");
  const ConvexBody& body = sampling.body;
  const TangentChart chart = chart_at(body, spec.slope);
  const Vec& n0 = chart.base().normal;
  Section s;
  s.spacing = sampling.spacing();
  std::vector<int> others;
  for (std::size_t i = 0; i < sampling.size(); ++i) {
    const auto& p = sampling.points[i];
    if (u[i] <= spec.m0(p.x)) {
      s.members.push_back(static_cast<int>(i));
      s.projected.push_back(chart.project(p.x));
      if (p.normal.dot(n0) <= 0) s.crosses_side = true;
    } else if (p.normal.dot(n0) > 0) {
      others.push_back(static_cast<int>(i));
    }
  }
  // A convex section leaves no same-side outsider inside its projected hull, up to sampling.
  const TangentHull hull(body.dim(), s.projected);
  for (int i : others) {
    const Tan q = chart.project(sampling.points[i].x);
    if (!hull.contains(q)) continue;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& m : s.projected) d = std::min(d, (m - q).norm());
    s.convexity_defect = std::max(s.convexity_defect, d);
  }
  return s;
}

LocalityResult section_locality_check(const SurfaceSampling& sampling, const std::vector<double>& u,
                                      const Vec& x0, double u_x0, const Vec& slope, double h,
                                      double eta, std::size_t scan) {
  if (!(h > 0) || !(eta > 0) || scan < 2) throw Error(ErrorCode::InvalidArgument, "locality scan needs h, eta > 0");
  auto inside = [&](double height) {
    const SectionSpec spec = SectionSpec::through(x0, u_x0, slope, height);
    for (std::size_t i = 0; i < sampling.size(); ++i)
      if (u[i] <= spec.m0(sampling.points[i].x) && (sampling.points[i].x - x0).norm() > eta) return false;
    return true;
  };
  // Sections grow with height, so the scan stops at the first escape.
  LocalityResult r;
  const double lo = 1e-3 * h, hi = 1e3 * h;
  for (std::size_t k = 0; k < scan; ++k) {
    const double height = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(scan - 1));
    ++r.heights_scanned;
    if (!inside(height)) break;
    r.h_star = height;
  }
  r.pass = h <= r.h_star || inside(h);
  return r;
}

LowerAleksandrov lower_aleksandrov_check(const PotentialOnSamples& pot, const SectionSpec& spec,
                                         double theta, double conerad_half) {
  const SurfaceSampling& src = *pot.sources;
  const ConvexBody& body = src.body;
  const int n = body.dim();
  const Section sec = section_extract(src, pot.u, spec);
  if (sec.members.empty()) throw Error(ErrorCode::InsufficientSamples, "section contains no samples");
  const TangentChart chart = chart_at(body, spec.slope);
  const Vec& n0 = chart.base().normal;
  for (int i : sec.members)
    if (!(src.points[i].normal.dot(n0) > theta))
      throw Error(ErrorCode::HypothesisFailed, "section leaves the cone of the slope point");

  const TangentHull hull(n, sec.projected);
  const Tan c = hull.centroid();
  const TangentHull half = hull.dilate(c, 0.5);
  const SurfacePoint center = c_exp(chart, c);
  for (int i : sec.members)
    if ((src.points[i].x - center.x).norm() > 0.25 * conerad_half)
      throw Error(ErrorCode::HypothesisFailed, "section is not localized around its center of mass");

  LowerAleksandrov r;
  r.section_size = sec.members.size();
  std::vector<char> in_a(src.size(), 0), in_s(src.size(), 0);
  for (std::size_t k = 0; k < sec.members.size(); ++k) {
    const int i = sec.members[k];
    in_s[i] = 1;
    if (half.contains(sec.projected[k])) {
      in_a[i] = 1;
      r.area_a += src.weights[i];
      ++r.a_size;
    }
    r.lhs = std::max(r.lhs, std::pow(std::max(spec.m0(src.points[i].x) - pot.u[i], 0.0), n));
  }
  const auto owner = assign_targets(pot);
  const SurfaceSampling& dst = *pot.targets;
  for (std::size_t j = 0; j < dst.size(); ++j) {
    if (!in_s[owner[j]]) continue;
    if (!(dst.points[j].normal.dot(center.normal) > 0))
      throw Error(ErrorCode::HypothesisFailed, "subdifferential of the section crosses to the far side");
    if (in_a[owner[j]]) r.area_image += dst.weights[j];
  }
  r.rhs = 0.25 * theta * r.area_a * r.area_image;
  r.margin = r.lhs - r.rhs;
  r.pass = r.margin >= -kAreaSlack * r.rhs;
  return r;
}

UpperAleksandrov upper_aleksandrov_check(const ConvexBody& body, const SyntheticPotential& potential,
                                         const SurfaceSampling& sampling, const SectionSpec& spec,
                                         const Vec& x0, const std::vector<Tan>& directions,
                                         double hypothesis_radius) {
  const int n = body.dim();
  const auto u = potential.evaluate(sampling.positions());
  const Section sec = section_extract(sampling, u, spec);
  if (sec.members.empty()) throw Error(ErrorCode::InsufficientSamples, "section contains no samples");
  const TangentChart chart = chart_at(body, x0);
  const Vec& n0 = chart.base().normal;
  for (int i : sec.members) {
    const auto& p = sampling.points[i];
    if (!(p.normal.dot(n0) > 0) || (p.x - x0).norm() > hypothesis_radius)
      throw Error(ErrorCode::HypothesisFailed, "section leaves the same-side neighbourhood of the base point");
  }
  const double lift = spec.m0(x0) - potential(x0);
  if (!(lift > 0)) throw Error(ErrorCode::HypothesisFailed, "section height at the base point must be positive");

  UpperAleksandrov r;
  r.height = std::pow(lift, n);
  std::vector<Tan> proj;
  for (int i : sec.members) {
    proj.push_back(chart.project(sampling.points[i].x));
    r.area_section += sampling.weights[i];
  }
  const TangentHull hull(n, proj);

  const auto act = potential.active(x0, 1e-12 * std::max(1.0, body.diam() * body.diam()));
  std::vector<Tan> slopes;
  for (int k : act) {
    const Vec& z = potential.slopes[k];
    if (!(body.normal(z).normal.dot(n0) > 0) || (z - x0).norm() > hypothesis_radius)
      throw Error(ErrorCode::HypothesisFailed, "subdifferential leaves the same-side neighbourhood of the base point");
    slopes.push_back(chart.project(z));
  }
  const TangentHull subdiff(n, slopes);
  if (subdiff.vertices().size() < static_cast<std::size_t>(n + 1) && n == 2)
    throw Error(ErrorCode::DegenerateSubdifferential, "subdifferential at the base point has no interior");
  for (std::size_t i = 0; i < sampling.size(); ++i) {
    const auto& p = sampling.points[i];
    if (p.normal.dot(n0) > 0 && subdiff.contains(chart.project(p.x))) r.area_subdiff += sampling.weights[i];
  }
  if (!(r.area_subdiff > 0))
    throw Error(ErrorCode::DegenerateSubdifferential, "sampling resolves no area inside the subdifferential");

  for (const auto& w : directions) {
    const double chord = hull.max_chord(w);
    const double dist = hull.support(w.normalized()) - chart.project(x0).dot(w.normalized());
    const double implied = dist > 0 ? chord / dist * r.height / (r.area_subdiff * r.area_section)
                                    : std::numeric_limits<double>::infinity();
    if (r.by_direction.empty()) {
      r.chord = chord;
      r.plane_distance = dist;
      r.implied_constant = implied;
    }
    r.by_direction.emplace_back(w, implied);
  }
  return r;
}

CCone c_cone_eval(const SurfaceSampling& sampling, const std::vector<int>& section, const Vec& x0,
                  double u_x0, const SectionSpec& spec, const std::vector<Vec>& candidates) {
  CCone out;
  const double tol = 1e-12 * std::max(1.0, sampling.body.diam() * sampling.body.diam());
  if (u_x0 > spec.m0(x0) + tol) throw Error(ErrorCode::InvalidArgument, "cone vertex must lie in the section");
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double a = u_x0 + cost(x0, candidates[k]);
    bool ok = true;
    for (int i : section) {
      const Vec& x = sampling.points[i].x;
      if (-cost(x, candidates[k]) + a > spec.m0(x) + tol) {
        ok = false;
        break;
      }
    }
    if (ok) out.admissible.push_back(static_cast<int>(k));
  }
  if (out.admissible.empty()) throw Error(ErrorCode::NoAdmissibleSlope, "no candidate slope stays below m0 on the section");
  auto eval = [&](const Vec& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (int k : out.admissible) best = std::max(best, -cost(x, candidates[k]) + u_x0 + cost(x0, candidates[k]));
    return best;
  };
  out.values.resize(sampling.size());
  for (std::size_t i = 0; i < sampling.size(); ++i) out.values[i] = eval(sampling.points[i].x);
  out.worst_excess_on_section = -std::numeric_limits<double>::infinity();
  for (int i : section)
    out.worst_excess_on_section = std::max(out.worst_excess_on_section, out.values[i] - spec.m0(sampling.points[i].x));
  out.vertex_gap = std::abs(eval(x0) - u_x0);
  return out;
}

}  // namespace otsurf
