#include <cmath>
#include <numbers>

#include <doctest.h>

#include "otsurf/measures.hpp"
#include "otsurf/theory.hpp"
#include "otsurf/transport.hpp"

using namespace otsurf;

namespace {

// Composite Gauss-Legendre, 5 nodes per panel, independent of the library quadrature.
template <class F>
double gauss(F f, double a, double b, int panels) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                              0.2369268850561891};
  const double h = (b - a) / panels;
  double s = 0;
  for (int p = 0; p < panels; ++p) {
    const double m = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) s += w[k] * f(m + 0.5 * h * x[k]);
  }
  return 0.5 * h * s;
}

}  // namespace

TEST_CASE("sphere measures") {
  CHECK(sphere_measure(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sphere_measure(1) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_measure(2) == doctest::Approx(4 * std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("stay-away integral closed forms") {
  CHECK(stay_away_integral(2) == doctest::Approx(3 * std::numbers::pi / 16).epsilon(1e-12));
  CHECK(stay_away_integral(3) == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(stay_away_integral(4) == doctest::Approx(5 * std::numbers::pi / 256).epsilon(1e-12));
  const double g = gauss([](double t) { return std::pow(std::cos(t), 5) * std::pow(std::sin(t), 1); }, 0,
                         std::numbers::pi / 2, 64);
  CHECK(stay_away_integral(3) == doctest::Approx(g).epsilon(1e-12));
  CHECK_THROWS_AS(stay_away_integral(1), Error);
}

TEST_CASE("stay-away constant on the unit sphere") {
  const double rho0 = 1 / (4 * std::numbers::pi);
  // (64 * 194^2)^(1/3): unit cone radius, diameter 2.
  const double frozen = 134.0482487572355;
  CHECK(std::cbrt(2408704.0) == doctest::Approx(frozen).epsilon(1e-14));
  const double c = stay_away_constant(2, rho0, 1.0, 2.0);
  CHECK(std::abs(c / frozen - 1) <= 1e-10);
  // Same value from the independent quadrature.
  const double integral = gauss([](double t) { return std::pow(std::cos(t), 4); }, 0, std::numbers::pi / 2, 64);
  const double m = 1.0 / 194;
  const double pref = rho0 * 2 / 6;
  CHECK(std::abs(std::pow(pref * m * m * integral, -1.0 / 3) / c - 1) <= 1e-10);
}

TEST_CASE("doubling the density bound scales the stay-away constant by 2^(-1/(n+1))") {
  for (int n : {2, 3}) {
    const double a = stay_away_constant(n, 0.1, 0.3, 2.5);
    const double b = stay_away_constant(n, 0.2, 0.3, 2.5);
    CHECK(b / a == doctest::Approx(std::pow(2.0, -1.0 / (n + 1))).epsilon(1e-13));
  }
}

TEST_CASE("threshold is the larger of its two terms") {
  const auto t = threshold_eval(2, 0.4, 130.0, 1.6, 1.2, 1e-3);
  const double first = 0.4 / (64 * 130.0);
  const double second = 0.4 / (16 * 130.0 * 1.6 * 1.2 * 1.2);
  CHECK(t.first_term == doctest::Approx(first).epsilon(1e-15));
  CHECK(t.second_term == doctest::Approx(second).epsilon(1e-15));
  CHECK(t.rhs == doctest::Approx(std::max(first, second)).epsilon(1e-15));
  CHECK(t.w2_threshold == doctest::Approx(std::pow(t.rhs, 2.0)).epsilon(1e-13));
  CHECK_FALSE(t.verdict);
}

TEST_CASE("quasi-convexity defect vanishes at the segment endpoints") {
  const auto body = ConvexBody::rounded_box(Vec(1, 0.7, 0.5), 0.4);
  const Vec x0 = body.boundary_along(Vec(0.3, 0.4, 0.866).normalized()).x;
  const Vec x = body.boundary_along(Vec(0.1, 0.5, 0.86).normalized()).x;
  const Vec a = body.boundary_along(Vec(0.35, 0.3, 0.88).normalized()).x;
  const Vec b = body.boundary_along(Vec(0.25, 0.45, 0.85).normalized()).x;
  CHECK(std::abs(qqconv_check(body, x0, x, a, b, {0.0, 1.0})) <= 1e-14);
}

TEST_CASE("quasi-convexity battery holds on the sphere and the stadium") {
  for (const auto& body : {ConvexBody::unit_sphere(), ConvexBody::stadium(1.0, 0.5)}) {
    const auto r = qqconv_battery(body, 500, 33, 11);
    CHECK(r.pass);
    CHECK(r.worst_violation <= 1e-9 * body.diam() * body.diam());
  }
}

TEST_CASE("single-slope crease has that slope everywhere") {
  const auto body = ConvexBody::unit_sphere();
  const Vec x0 = Vec(0, 0.6, 0.8);
  const Tan p(0.1, -0.05);
  const auto pot = SyntheticPotential::crease(body, x0, {p});
  REQUIRE(pot.slopes.size() == 1);
  CHECK((pot.slopes[0] - c_exp(chart_at(body, x0), p).x).norm() < 1e-12);
  CHECK(pot(x0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(pot.argmax(Vec(1, 0, 0)) == 0);
}

TEST_CASE("sections of the identity potential on the sphere are caps") {
  const auto s = sample_surface(ConvexBody::unit_sphere(), 3000, 1);
  const Vec z = Vec::UnitZ();
  // One zero-offset slope per sample, so u vanishes on the samples.
  SyntheticPotential pot{s->positions(), std::vector<double>(s->size(), 0.0)};
  const auto u = pot.evaluate(s->positions());
  const auto spec = SectionSpec::through(z, pot(z), z, 0.1);
  const auto sec = section_extract(*s, u, spec);
  CHECK_FALSE(sec.crosses_side);
  CHECK(sec.convexity_defect <= 2 * sec.spacing);
  // Cap {c(X, z) <= 0.1}: height 0.1 below the pole, so 1 - z_3 <= 0.1.
  for (int i : sec.members) CHECK(s->points[i].x.z() >= 0.9 - 1e-12);
}

TEST_CASE("identity map has Holder exponent one") {
  const auto s = sample_surface(ConvexBody::unit_sphere(), 400, 8);
  const auto xs = s->positions();
  const auto fit = holder_fit(xs, xs, 0.5);
  CHECK(fit.pairs > 0);
  CHECK(fit.exponent == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("constant potential has zero Lipschitz constant and no exceptions") {
  const auto s = sample_surface(ConvexBody::unit_sphere(), 300, 6);
  const auto mu = make_measure(s, DensitySpec::uniform());
  const auto r = solve_exact(mu, mu);
  DualPair dual;
  dual.u.assign(s->size(), 0.0);
  dual.uc = c_transform(dual.u, s->positions(), s->positions());
  const auto lip = potential_lipschitz_check(*s, dual, 0.0, 0.5, 1.6, {0.1, 1.0});
  CHECK(lip.lipschitz == 0.0);
  for (const auto& scan : lip.scans) CHECK(scan.hypothesis);
  (void)r;
}

TEST_CASE("plan_map rejects split plans") {
  TransportPlan plan;
  plan.sources = 1;
  plan.targets = 2;
  plan.entries = {{0, 0, 0.5}, {0, 1, 0.5}};
  const std::vector<Vec> ys{Vec(1, 0, 0), Vec(-1, 0, 0)};
  CHECK_THROWS_AS(plan_map(plan, {1.0}, ys, 0.1), Error);
}
