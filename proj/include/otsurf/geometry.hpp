#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "otsurf/error.hpp"

namespace otsurf {

// Ambient points live in R^3; for curves (n == 1) the third entry is zero.
using Vec = Eigen::Vector3d;
// Tangent-plane coordinates; for n == 1 the second entry is zero.
using Tan = Eigen::Vector2d;

inline double cost(const Vec& a, const Vec& b) { return 0.5 * (a - b).squaredNorm(); }

enum class Shape { Ball, Ellipsoid, Lens, Stadium2D, RoundedBox3D, BallHull };

const char* shape_name(Shape s);

struct SurfacePoint {
  Vec x = Vec::Zero();
  Vec normal = Vec::Zero();
  int chart = 0;
  bool non_unique = false;
};

struct NormalQuery {
  Vec normal;
  bool non_unique = false;
};

struct BodyMetricsCache {
  double diam = 0.0;
  double inradius = 0.0;
  double outradius = 0.0;
};

class ShapeImpl;

// Immutable convex body containing the origin in its interior.
class ConvexBody {
 public:
  static ConvexBody ball(int n, const Vec& center, double radius);
  static ConvexBody unit_sphere(int n = 2) { return ball(n, Vec::Zero(), 1.0); }
  static ConvexBody ellipsoid(int n, const Vec& semi_axes);
  static ConvexBody lens(int n, double cap_radius);
  static ConvexBody stadium(double half_length, double cap_radius);
  static ConvexBody rounded_box(const Vec& half_widths, double corner_radius);
  static ConvexBody from_json(const nlohmann::json& spec);

  int dim() const;
  Shape shape() const;
  bool is_c1() const;
  const BodyMetricsCache& metrics() const;
  double diam() const { return metrics().diam; }
  nlohmann::json to_json() const;

  // Signed level function: negative inside, zero on the boundary.
  double level(const Vec& x) const;
  bool contains(const Vec& x, double tol = 0.0) const;
  // Approximate distance from x to the boundary (exact for most shapes).
  double boundary_distance(const Vec& x) const;
  // Parameter interval {t : q + t d in body}, if nonempty.
  std::optional<std::pair<double, double>> line_interval(const Vec& q, const Vec& d) const;
  // Radial function along a unit direction.
  double radial(const Vec& dir) const;
  SurfacePoint boundary_along(const Vec& dir) const;
  // Normal at a boundary point; throws PointOffBoundary when x is too far away.
  NormalQuery normal(const Vec& x) const;
  double support(const Vec& u) const;
  int chart_id(const Vec& x) const;

  const ShapeImpl& impl() const { return *impl_; }
  explicit ConvexBody(std::shared_ptr<const ShapeImpl> impl);

 private:
  std::shared_ptr<const ShapeImpl> impl_;
};

// Unit vectors spanning the tangent space orthogonal to a unit normal.
struct Frame {
  Vec t1 = Vec::Zero();
  Vec t2 = Vec::Zero();
  int n = 2;
  Tan coords(const Vec& v) const;
  Vec embed(const Tan& p) const;
};

Frame tangent_frame(int n, const Vec& normal);

Vec normal_at(const ConvexBody& body, const Vec& x, bool* non_unique = nullptr);
Tan tangent_project(const ConvexBody& body, const Vec& x, const Vec& y);

class TangentChart {
 public:
  TangentChart(ConvexBody body, SurfacePoint base);
  const SurfacePoint& base() const { return base_; }
  const Frame& frame() const { return frame_; }
  const ConvexBody& body() const { return body_; }
  // Graph height over the tangent plane; nullopt outside the chart domain.
  std::optional<double> beta(const Tan& p) const;
  bool in_domain(const Tan& p) const { return beta(p).has_value(); }
  Tan project(const Vec& y) const { return frame_.coords(y - base_.x); }
  Vec lift(const Tan& p, double height) const;

 private:
  ConvexBody body_;
  SurfacePoint base_;
  Frame frame_;
};

TangentChart chart_at(const ConvexBody& body, const Vec& x0);
SurfacePoint c_exp(const TangentChart& chart, const Tan& p);
SurfacePoint c_segment(const TangentChart& chart, const Vec& xbar0, const Vec& xbar1, double t);

struct ConeParams {
  double theta = 0.5;
  double conerad = 0.0;       // raw sampled estimate (biased upward)
  double conerad_safe = 0.0;  // shrunk by the safety factor
  std::vector<std::pair<double, double>> modulus;  // (r, sampled modulus)
  std::size_t pairs_used = 0;
  std::size_t verification_pairs = 0;
  bool verified = false;
  std::string warning;
};

inline constexpr double kConeradSafety = 0.95;

ConeParams conerad(const ConvexBody& body, double theta, std::size_t pair_budget = 10000,
                   std::uint64_t seed = 1);

struct ConeCheck {
  bool pass = true;
  double worst_margin = 0.0;  // max over samples of level(X), should be <= tol
  std::size_t samples = 0;
};

ConeCheck cone_inclusion_check(const ConvexBody& body, const Vec& x0, double theta,
                               double cone_radius, std::size_t samples, std::uint64_t seed = 1);

struct BodyMetrics {
  double diam = 0.0;
  double inradius = 0.0;
  double outradius = 0.0;
  double geodesic_constant = 1.0;
  double radial_lipschitz = 1.0;
  std::size_t samples = 0;
};

BodyMetrics body_metrics(const ConvexBody& body, std::size_t samples = 1500,
                         std::uint64_t seed = 1, int knn = 40);

struct HausdorffResult {
  double distance = 0.0;
  std::size_t samples = 0;
};

HausdorffResult hausdorff_distance(const ConvexBody& a, const ConvexBody& b,
                                   std::size_t samples = 4000);

ConvexBody ball_hull(const ConvexBody& body, double hull_radius, std::size_t directions = 0);

std::vector<bool> same_side_set(const ConvexBody& body, const Vec& x0, double theta,
                                const std::vector<Vec>& points);

// Fibonacci directions on S^n (n == 2) or equally spaced angles (n == 1), rigidly rotated by seed.
std::vector<Vec> direction_grid(int n, std::size_t count, std::uint64_t seed);

struct BoundarySample {
  std::vector<SurfacePoint> points;
  std::vector<double> weights;  // local area shares
};

// Curves: equal arc-length points with equal weights. Surfaces: farthest-point selection from a
// dense radial candidate set followed by discrete Lloyd steps; each point's weight is the summed
// radial-quadrature area of the candidates nearest to it.
BoundarySample quasi_uniform_boundary(const ConvexBody& body, std::size_t count, std::uint64_t seed);

// Symmetric k-nearest-neighbour graph with Euclidean edge lengths.
struct KnnGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> dijkstra(int source) const;
  bool connected() const;
};

KnnGraph knn_graph(const std::vector<Vec>& points, int k);

}  // namespace otsurf
