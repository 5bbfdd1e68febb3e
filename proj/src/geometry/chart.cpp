#include <cmath>

#include "shape_impl.hpp"

namespace otsurf {

Tan Frame::coords(const Vec& v) const {
  return Tan(t1.dot(v), n == 2 ? t2.dot(v) : 0.0);
}

Vec Frame::embed(const Tan& p) const {
  return n == 2 ? Vec(p[0] * t1 + p[1] * t2) : Vec(p[0] * t1);
}

Frame tangent_frame(int n, const Vec& normal) {
  Frame f;
  f.n = n;
  if (n == 1) {
    f.t1 = Vec(normal[1], -normal[0], 0.0).normalized();
    return f;
  }
  Vec a = std::abs(normal[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
  f.t1 = (a - a.dot(normal) * normal).normalized();
  f.t2 = normal.cross(f.t1);
  return f;
}

Vec normal_at(const ConvexBody& body, const Vec& x, bool* non_unique) {
  NormalQuery q = body.normal(x);
  if (non_unique) *non_unique = q.non_unique;
  return q.normal;
}

Tan tangent_project(const ConvexBody& body, const Vec& x, const Vec& y) {
  NormalQuery q = body.normal(x);
  if (q.non_unique) throw Error(ErrorCode::NonUniqueNormal, "tangent projection at a kink");
  return tangent_frame(body.dim(), q.normal).coords(y - x);
}

TangentChart::TangentChart(ConvexBody body, SurfacePoint base)
    : body_(std::move(body)), base_(std::move(base)), frame_(tangent_frame(body_.dim(), base_.normal)) {}

std::optional<double> TangentChart::beta(const Tan& p) const {
  auto iv = body_.line_interval(base_.x + frame_.embed(p), base_.normal);
  if (!iv) return std::nullopt;
  return std::min(iv->second, 0.0);
}

Vec TangentChart::lift(const Tan& p, double height) const {
  return base_.x + frame_.embed(p) + height * base_.normal;
}

TangentChart chart_at(const ConvexBody& body, const Vec& x0) {
  NormalQuery q = body.normal(x0);
  if (q.non_unique) throw Error(ErrorCode::NonUniqueNormal, "chart requested at a kink");
  SurfacePoint sp;
  sp.x = x0;
  sp.normal = q.normal;
  sp.chart = body.chart_id(x0);
  return TangentChart(body, sp);
}

SurfacePoint c_exp(const TangentChart& chart, const Tan& p) {
  auto b = chart.beta(p);
  if (!b) throw Error(ErrorCode::OutsideChartDomain, "tangent vector outside chart domain");
  SurfacePoint out;
  out.x = chart.lift(p, *b);
  NormalQuery q = chart.body().impl().normal_raw(out.x);
  out.normal = q.normal;
  out.non_unique = q.non_unique;
  out.chart = chart.body().chart_id(out.x);
  return out;
}

SurfacePoint c_segment(const TangentChart& chart, const Vec& xbar0, const Vec& xbar1, double t) {
  const Vec& n0 = chart.base().normal;
  for (const Vec* y : {&xbar0, &xbar1}) {
    if (chart.body().normal(*y).normal.dot(n0) <= 0)
      throw Error(ErrorCode::NotSameSide, "c-segment endpoints must lie on the same side");
  }
  Tan p = (1 - t) * chart.project(xbar0) + t * chart.project(xbar1);
  return c_exp(chart, p);
}

std::vector<bool> same_side_set(const ConvexBody& body, const Vec& x0, double theta,
                                const std::vector<Vec>& points) {
  NormalQuery q0 = body.normal(x0);
  if (q0.non_unique) throw Error(ErrorCode::NonUniqueNormal, "base point is a kink");
  std::vector<bool> mask(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    NormalQuery q = body.normal(points[i]);
    if (q.non_unique) throw Error(ErrorCode::NonUniqueNormal, "query point is a kink");
    mask[i] = q.normal.dot(q0.normal) > theta;
  }
  return mask;
}

}  // namespace otsurf
