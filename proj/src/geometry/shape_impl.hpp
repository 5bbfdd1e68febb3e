#pragma once

#include <optional>
#include <utility>

#include "otsurf/geometry.hpp"

namespace otsurf {

class ShapeImpl {
 public:
  virtual ~ShapeImpl() = default;

  virtual Shape shape() const = 0;
  virtual bool c1() const { return true; }
  // Convex, negative in the interior, zero on the boundary.
  virtual double level(const Vec& x) const = 0;
  virtual double boundary_distance(const Vec& x) const;
  // Default: golden-section minimum of the level along the line, then bisection.
  virtual std::optional<std::pair<double, double>> line_interval(const Vec& q, const Vec& d) const;
  // x is assumed to lie on the boundary.
  virtual NormalQuery normal_raw(const Vec& x) const = 0;
  virtual double support(const Vec& u) const = 0;
  virtual int chart_id(const Vec& /*x*/) const { return 0; }
  virtual nlohmann::json to_json() const = 0;

  int n = 2;
  BodyMetricsCache cache;
};

// Exit parameters of the line q + t d against the ball |x - c| <= r.
std::optional<std::pair<double, double>> ball_interval(const Vec& q, const Vec& d, const Vec& c,
                                                       double r);

}  // namespace otsurf
