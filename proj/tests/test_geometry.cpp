#include <cmath>
#include <numbers>

#include <doctest.h>

#include "otsurf/error.hpp"
#include "otsurf/geometry.hpp"

using namespace otsurf;

TEST_CASE("unit sphere boundary, normal and support are the identity") {
  const auto s = ConvexBody::unit_sphere();
  const Vec d = Vec(1, -2, 2).normalized();
  const auto p = s.boundary_along(d);
  CHECK((p.x - d).norm() < 1e-12);
  CHECK((p.normal - d).norm() < 1e-12);
  CHECK(s.support(Vec(3, 0, 4)) == doctest::Approx(5.0).epsilon(1e-12));
  const auto iv = s.line_interval(Vec::Zero(), Vec::UnitX());
  REQUIRE(iv.has_value());
  CHECK(iv->first == doctest::Approx(-1.0));
  CHECK(iv->second == doctest::Approx(1.0));
}

TEST_CASE("circle in the plane keeps z at zero") {
  const auto c = ConvexBody::unit_sphere(1);
  const auto p = c.boundary_along(Vec(0.6, 0.8, 0));
  CHECK(p.x.z() == 0.0);
  CHECK(p.x.norm() == doctest::Approx(1.0));
}

TEST_CASE("rounded box support is box support plus corner radius") {
  const Vec half(1.0, 0.5, 0.25);
  const auto b = ConvexBody::rounded_box(half, 0.4);
  const Vec u = Vec(1, 2, -3).normalized();
  const double expected = half.cwiseProduct(u.cwiseAbs()).sum() + 0.4;
  CHECK(b.support(u) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("stadium diameter is the long axis") {
  const auto st = ConvexBody::stadium(1.0, 0.5);
  CHECK(st.diam() == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("cost is half the squared distance") {
  CHECK(cost(Vec(1, 0, 0), Vec(0, 1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("c_exp of a projected boundary point returns that point") {
  const auto s = ConvexBody::unit_sphere();
  const Vec x0 = Vec(0.2, 0.3, 1).normalized();
  const auto chart = chart_at(s, x0);
  const Vec z = Vec(0.5, 0.1, 1).normalized();
  const auto back = c_exp(chart, chart.project(z));
  CHECK((back.x - z).norm() < 1e-10);
}

TEST_CASE("c_segment endpoints are the given points") {
  const auto s = ConvexBody::rounded_box(Vec(1, 1, 1), 0.4);
  const Vec x0 = s.boundary_along(Vec(0.3, 0.4, 0.866).normalized()).x;
  const auto chart = chart_at(s, x0);
  const Vec a = s.boundary_along(Vec(0.4, 0.3, 0.866).normalized()).x;
  const Vec b = s.boundary_along(Vec(0.2, 0.5, 0.84).normalized()).x;
  CHECK((c_segment(chart, a, b, 0.0).x - a).norm() < 1e-9);
  CHECK((c_segment(chart, a, b, 1.0).x - b).norm() < 1e-9);
}

TEST_CASE("Hausdorff distance between concentric spheres is the radius gap") {
  const auto a = ConvexBody::ball(2, Vec::Zero(), 1.0);
  const auto b = ConvexBody::ball(2, Vec::Zero(), 1.1);
  CHECK(hausdorff_distance(a, b).distance == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("ball hull of a sphere is an outer approximation converging to the sphere") {
  const auto s = ConvexBody::unit_sphere();
  const auto coarse = ball_hull(s, 4.0, 1500);
  const auto fine = ball_hull(s, 4.0, 6000);
  for (const auto& d : direction_grid(2, 500, 3)) CHECK(fine.contains(d, 1e-12));
  const double dc = hausdorff_distance(s, coarse).distance;
  const double df = hausdorff_distance(s, fine).distance;
  CHECK(df < dc);
  CHECK(df < 0.01);
}

TEST_CASE("ball hull distance shrinks as the hull radius grows") {
  const auto st = ConvexBody::stadium(1.0, 0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (double r : {4.0, 8.0, 16.0}) {
    const double d = hausdorff_distance(st, ball_hull(st, r)).distance;
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("ball hull rejects a radius below the outradius") {
  CHECK_THROWS_AS(ball_hull(ConvexBody::unit_sphere(), 0.5), Error);
}

TEST_CASE("knn graph on a circle is connected and geodesics exceed chords") {
  std::vector<Vec> pts;
  for (int k = 0; k < 200; ++k) {
    const double a = 2 * std::numbers::pi * k / 200;
    pts.emplace_back(std::cos(a), std::sin(a), 0);
  }
  const auto g = knn_graph(pts, 4);
  CHECK(g.connected());
  const auto d = g.dijkstra(0);
  CHECK(d[100] >= (pts[100] - pts[0]).norm());
  CHECK(d[100] == doctest::Approx(std::numbers::pi).epsilon(1e-3));
}
