#include <algorithm>
#include <cmath>
#include <limits>

#include "shape_impl.hpp"

namespace otsurf {

namespace {

constexpr double kGolden = 0.6180339887498949;

Vec axis_of(int n) { return n == 1 ? Vec(0, 1, 0) : Vec(0, 0, 1); }

Vec vec_from_json(const nlohmann::json& j) {
  Vec v = Vec::Zero();
  for (std::size_t i = 0; i < j.size() && i < 3; ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

nlohmann::json vec_to_json(const Vec& v, int ambient) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < ambient; ++i) j.push_back(v[i]);
  return j;
}

class BallShape final : public ShapeImpl {
 public:
  BallShape(int dim, Vec c, double r) : center(std::move(c)), radius(r) {
    n = dim;
    cache = {2 * r, r - center.norm(), r + center.norm()};
  }
  Shape shape() const override { return Shape::Ball; }
  double level(const Vec& x) const override { return (x - center).norm() - radius; }
  std::optional<std::pair<double, double>> line_interval(const Vec& q, const Vec& d) const override {
    return ball_interval(q, d, center, radius);
  }
  NormalQuery normal_raw(const Vec& x) const override { return {(x - center).normalized(), false}; }
  double support(const Vec& u) const override { return u.dot(center) + radius * u.norm(); }
  nlohmann::json to_json() const override {
    return {{"shape", "ball"}, {"n", n}, {"center", vec_to_json(center, n + 1)}, {"radius", radius}};
  }
  Vec center;
  double radius;
};

class EllipsoidShape final : public ShapeImpl {
 public:
  EllipsoidShape(int dim, Vec a) : axes(std::move(a)) {
    n = dim;
    if (n == 1) axes[2] = 1.0;
    double amin = n == 1 ? std::min(axes[0], axes[1]) : axes.minCoeff();
    double amax = n == 1 ? std::max(axes[0], axes[1]) : axes.maxCoeff();
    cache = {2 * amax, amin, amax};
  }
  Shape shape() const override { return Shape::Ellipsoid; }
  double gauge(const Vec& x) const { return x.cwiseQuotient(axes).norm(); }
  double level(const Vec& x) const override { return (gauge(x) - 1.0) * cache.inradius; }
  double boundary_distance(const Vec& x) const override {
    double r = x.norm();
    if (r == 0) return cache.inradius;
    return std::abs(r - r / gauge(x));
  }
  std::optional<std::pair<double, double>> line_interval(const Vec& q, const Vec& d) const override {
    Vec qs = q.cwiseQuotient(axes), ds = d.cwiseQuotient(axes);
    double a = ds.squaredNorm(), b = qs.dot(ds), c = qs.squaredNorm() - 1.0;
    double disc = b * b - a * c;
    if (a == 0 || disc < 0) return std::nullopt;
    double s = std::sqrt(disc);
    return std::make_pair((-b - s) / a, (-b + s) / a);
  }
  NormalQuery normal_raw(const Vec& x) const override {
    Vec g = x.cwiseQuotient(axes.cwiseProduct(axes));
    if (n == 1) g[2] = 0;
    return {g.normalized(), false};
  }
  double support(const Vec& u) const override { return u.cwiseProduct(axes).norm(); }
  nlohmann::json to_json() const override {
    return {{"shape", "ellipsoid"}, {"n", n}, {"semi_axes", vec_to_json(axes, n + 1)}};
  }
  Vec axes;
};

// Intersection of two balls of radius R centred at -(R-1)e and +(R-1)e along the last axis.
class LensShape final : public ShapeImpl {
 public:
  LensShape(int dim, double r) : cap_radius(r) {
    n = dim;
    e = axis_of(n);
    rim = std::sqrt(2 * r - 1);
    cache = {std::max(2 * rim, 2.0), 1.0, rim};
  }
  Shape shape() const override { return Shape::Lens; }
  bool c1() const override { return false; }
  Vec top_center() const { return -(cap_radius - 1) * e; }
  Vec bottom_center() const { return (cap_radius - 1) * e; }
  double level(const Vec& x) const override {
    return std::max((x - top_center()).norm(), (x - bottom_center()).norm()) - cap_radius;
  }
  std::optional<std::pair<double, double>> line_interval(const Vec& q, const Vec& d) const override {
    auto a = ball_interval(q, d, top_center(), cap_radius);
    auto b = ball_interval(q, d, bottom_center(), cap_radius);
    if (!a || !b) return std::nullopt;
    double lo = std::max(a->first, b->first), hi = std::min(a->second, b->second);
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
  }
  NormalQuery normal_raw(const Vec& x) const override {
    Vec up = (x - top_center()) / cap_radius;
    Vec down = (x - bottom_center()) / cap_radius;
    double z = x.dot(e);
    if (std::abs(z) <= 1e-9 * cache.diam) return {(up + down).normalized(), true};
    return {(z > 0 ? up : down).normalized(), false};
  }
  double support(const Vec& u) const override {
    double un = u.norm();
    if (un == 0) return 0;
    double uz = u.dot(e) / un;
    double cut = (cap_radius - 1) / cap_radius;
    if (uz >= cut) return u.dot(top_center()) + cap_radius * un;
    if (uz <= -cut) return u.dot(bottom_center()) + cap_radius * un;
    return (u - u.dot(e) * e).norm() * rim;
  }
  int chart_id(const Vec& x) const override {
    double z = x.dot(e);
    if (std::abs(z) <= 1e-9 * cache.diam) return 0;
    return z > 0 ? 1 : -1;
  }
  nlohmann::json to_json() const override {
    return {{"shape", "lens"}, {"n", n}, {"R", cap_radius}};
  }
  double cap_radius;
  double rim;
  Vec e;
};

class StadiumShape final : public ShapeImpl {
 public:
  StadiumShape(double l, double r) : half_length(l), cap_radius(r) {
    n = 1;
    cache = {2 * (l + r), r, l + r};
  }
  Shape shape() const override { return Shape::Stadium2D; }
  Vec core_point(const Vec& x) const {
    return Vec(std::clamp(x[0], -half_length, half_length), 0, 0);
  }
  double level(const Vec& x) const override { return (x - core_point(x)).norm() - cap_radius; }
  NormalQuery normal_raw(const Vec& x) const override {
    Vec d = x - core_point(x);
    d[2] = 0;
    return {d.normalized(), false};
  }
  double support(const Vec& u) const override {
    return half_length * std::abs(u[0]) + cap_radius * std::hypot(u[0], u[1]);
  }
  int chart_id(const Vec& x) const override {
    if (x[0] > half_length) return 1;
    if (x[0] < -half_length) return -1;
    return 0;
  }
  nlohmann::json to_json() const override {
    return {{"shape", "stadium2d"}, {"half_length", half_length}, {"cap_radius", cap_radius}};
  }
  double half_length;
  double cap_radius;
};

class RoundedBoxShape final : public ShapeImpl {
 public:
  RoundedBoxShape(Vec b, double r) : half_widths(std::move(b)), corner_radius(r) {
    n = 2;
    cache = {2 * (half_widths.norm() + r), half_widths.minCoeff() + r, half_widths.norm() + r};
  }
  Shape shape() const override { return Shape::RoundedBox3D; }
  Vec core_point(const Vec& x) const { return x.cwiseMax(-half_widths).cwiseMin(half_widths); }
  double level(const Vec& x) const override { return (x - core_point(x)).norm() - corner_radius; }
  NormalQuery normal_raw(const Vec& x) const override {
    return {(x - core_point(x)).normalized(), false};
  }
  double support(const Vec& u) const override {
    return half_widths.dot(u.cwiseAbs()) + corner_radius * u.norm();
  }
  int chart_id(const Vec& x) const override {
    int id = 0;
    for (int i = 0; i < 3; ++i) id = 3 * id + (x[i] > half_widths[i] ? 2 : x[i] < -half_widths[i] ? 0 : 1);
    return id;
  }
  nlohmann::json to_json() const override {
    return {{"shape", "rounded_box3d"},
            {"half_widths", vec_to_json(half_widths, 3)},
            {"corner_radius", corner_radius}};
  }
  Vec half_widths;
  double corner_radius;
};

}  // namespace

std::optional<std::pair<double, double>> ball_interval(const Vec& q, const Vec& d, const Vec& c,
                                                       double r) {
  Vec w = q - c;
  double a = d.squaredNorm(), b = w.dot(d), cc = w.squaredNorm() - r * r;
  double disc = b * b - a * cc;
  if (a == 0 || disc < 0) return std::nullopt;
  double s = std::sqrt(disc);
  // Stable roots of a t^2 + 2 b t + cc: avoid cancellation in -b +- s.
  double qq = -(b + std::copysign(s, b));
  double t1 = qq / a;
  double t2 = qq != 0 ? cc / qq : t1;
  if (t1 > t2) std::swap(t1, t2);
  return std::make_pair(t1, t2);
}

double ShapeImpl::boundary_distance(const Vec& x) const { return std::abs(level(x)); }

std::optional<std::pair<double, double>> ShapeImpl::line_interval(const Vec& q,
                                                                  const Vec& d) const {
  double dn = d.norm();
  if (dn == 0) return std::nullopt;
  Vec u = d / dn;
  double span = q.norm() + cache.outradius + 1.0;
  auto f = [&](double t) { return level(q + t * u); };
  double a = -span, b = span;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 160 && b - a > 1e-15 * span; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  double tm = 0.5 * (a + b);
  if (f(tm) > 0) return std::nullopt;
  auto root = [&](double inside, double outside) {
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      if (f(mid) <= 0)
        inside = mid;
      else
        outside = mid;
    }
    return inside;
  };
  double lo = root(tm, -span), hi = root(tm, span);
  return std::make_pair(lo / dn, hi / dn);
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Ball: return "ball";
    case Shape::Ellipsoid: return "ellipsoid";
    case Shape::Lens: return "lens";
    case Shape::Stadium2D: return "stadium2d";
    case Shape::RoundedBox3D: return "rounded_box3d";
    case Shape::BallHull: return "ball_hull";
  }
  return "unknown";
}

ConvexBody::ConvexBody(std::shared_ptr<const ShapeImpl> impl) : impl_(std::move(impl)) {}

ConvexBody ConvexBody::ball(int n, const Vec& center, double radius) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  Vec c = center;
  if (n == 1) c[2] = 0;
  if (!(radius > c.norm())) throw Error(ErrorCode::OriginNotInterior, "ball must contain the origin");
  return ConvexBody(std::make_shared<BallShape>(n, c, radius));
}

ConvexBody ConvexBody::ellipsoid(int n, const Vec& semi_axes) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  for (int i = 0; i <= n; ++i)
    if (!(semi_axes[i] > 0)) throw Error(ErrorCode::InvalidArgument, "semi-axes must be positive");
  return ConvexBody(std::make_shared<EllipsoidShape>(n, semi_axes));
}

ConvexBody ConvexBody::lens(int n, double cap_radius) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  if (!(cap_radius > 1)) throw Error(ErrorCode::InvalidArgument, "lens cap radius must exceed 1");
  return ConvexBody(std::make_shared<LensShape>(n, cap_radius));
}

ConvexBody ConvexBody::stadium(double half_length, double cap_radius) {
  if (!(half_length >= 0 && cap_radius > 0))
    throw Error(ErrorCode::InvalidArgument, "stadium needs half_length >= 0, cap_radius > 0");
  return ConvexBody(std::make_shared<StadiumShape>(half_length, cap_radius));
}

ConvexBody ConvexBody::rounded_box(const Vec& half_widths, double corner_radius) {
  if (!(half_widths.minCoeff() >= 0 && corner_radius > 0))
    throw Error(ErrorCode::InvalidArgument, "rounded box needs half_widths >= 0, radius > 0");
  return ConvexBody(std::make_shared<RoundedBoxShape>(half_widths, corner_radius));
}

int ConvexBody::dim() const { return impl_->n; }
Shape ConvexBody::shape() const { return impl_->shape(); }
bool ConvexBody::is_c1() const { return impl_->c1(); }
const BodyMetricsCache& ConvexBody::metrics() const { return impl_->cache; }
nlohmann::json ConvexBody::to_json() const { return impl_->to_json(); }
double ConvexBody::level(const Vec& x) const { return impl_->level(x); }
bool ConvexBody::contains(const Vec& x, double tol) const { return impl_->level(x) <= tol; }
double ConvexBody::boundary_distance(const Vec& x) const { return impl_->boundary_distance(x); }
double ConvexBody::support(const Vec& u) const { return impl_->support(u); }
int ConvexBody::chart_id(const Vec& x) const { return impl_->chart_id(x); }

std::optional<std::pair<double, double>> ConvexBody::line_interval(const Vec& q,
                                                                   const Vec& d) const {
  return impl_->line_interval(q, d);
}

double ConvexBody::radial(const Vec& dir) const {
  auto iv = impl_->line_interval(Vec::Zero(), dir);
  if (!iv || iv->second <= 0) throw Error(ErrorCode::OriginNotInterior, "ray from origin misses body");
  return iv->second;
}

SurfacePoint ConvexBody::boundary_along(const Vec& dir) const {
  Vec u = dir.normalized();
  SurfacePoint p;
  p.x = radial(u) * u;
  NormalQuery nq = impl_->normal_raw(p.x);
  p.normal = nq.normal;
  p.non_unique = nq.non_unique;
  p.chart = impl_->chart_id(p.x);
  return p;
}

NormalQuery ConvexBody::normal(const Vec& x) const {
  if (impl_->boundary_distance(x) > 1e-6 * diam())
    throw Error(ErrorCode::PointOffBoundary, "point is not on the boundary");
  return impl_->normal_raw(x);
}

ConvexBody ConvexBody::from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("shape"))
    throw Error(ErrorCode::ConfigInvalid, "body spec needs a 'shape' key");
  const std::string s = spec.at("shape").get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (auto it = spec.begin(); it != spec.end(); ++it) {
      bool ok = it.key() == "shape";
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw Error(ErrorCode::ConfigInvalid, "unknown body key '" + it.key() + "'");
    }
  };
  try {
    if (s == "ball" || s == "sphere") {
      allow({"n", "center", "radius"});
      int n = spec.value("n", 2);
      Vec c = spec.contains("center") ? vec_from_json(spec["center"]) : Vec::Zero();
      return ball(n, c, spec.value("radius", 1.0));
    }
    if (s == "ellipsoid") {
      allow({"n", "semi_axes"});
      return ellipsoid(spec.value("n", 2), vec_from_json(spec.at("semi_axes")));
    }
    if (s == "lens") {
      allow({"n", "R"});
      return lens(spec.value("n", 2), spec.value("R", 5.0));
    }
    if (s == "stadium2d") {
      allow({"half_length", "cap_radius"});
      return stadium(spec.value("half_length", 1.0), spec.value("cap_radius", 1.0));
    }
    if (s == "rounded_box3d") {
      allow({"half_widths", "corner_radius"});
      return rounded_box(vec_from_json(spec.at("half_widths")), spec.value("corner_radius", 0.3));
    }
    if (s == "ball_hull") {
      allow({"base", "hull_radius", "directions"});
      return ball_hull(from_json(spec.at("base")), spec.at("hull_radius").get<double>(),
                       spec.value("directions", std::size_t{0}));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("body spec: ") + e.what());
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown shape '" + s + "'");
}

}  // namespace otsurf
