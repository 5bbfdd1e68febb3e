#include <algorithm>
#include <numeric>

#include <doctest.h>

#include "otsurf/measures.hpp"
#include "otsurf/transport.hpp"

using namespace otsurf;

namespace {

// Minimum assignment cost over all permutations; optimal for equal uniform masses.
double brute_force(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  std::vector<int> perm(xs.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) c += cost(xs[i], ys[perm[i]]);
    best = std::min(best, c / static_cast<double>(xs.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("exact solver matches a brute-force assignment") {
  const auto body = ConvexBody::unit_sphere();
  const auto s = sample_surface(body, 16, 3);
  std::vector<Vec> xs(s->points.size() > 6 ? 6 : s->points.size()), ys;
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = s->points[i].x;
  for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(s->points[15 - i].x);
  const std::vector<double> w(xs.size(), 1.0 / xs.size());
  const auto r = solve_exact(xs, w, ys, w);
  CHECK(r.primal == doctest::Approx(brute_force(xs, ys)).epsilon(1e-12));
  CHECK(r.gap <= 1e-8);
}

TEST_CASE("identical measures transport at zero cost with the identity plan") {
  const auto s = sample_surface(ConvexBody::unit_sphere(), 200, 5);
  const auto mu = make_measure(s, DensitySpec::uniform());
  const auto r = solve_exact(mu, mu);
  CHECK(r.w2 == doctest::Approx(0.0));
  const auto spread = monge_spread(r.plan, mu.mass, s->positions());
  CHECK(spread.max_spread == 0.0);
  CHECK(spread.split_mass == 0.0);
}

TEST_CASE("exact solver duals are feasible, tight and close the gap") {
  const auto s = sample_surface(ConvexBody::stadium(1.0, 0.5), 300, 9);
  const auto mu = make_measure(s, DensitySpec::uniform());
  const auto nu = make_measure(s, DensitySpec::custom([](const SurfacePoint& p) { return 1.0 + 0.3 * p.x[0]; }));
  const auto r = solve_exact(mu, nu);
  CHECK(r.gap <= 1e-8);
  CHECK(r.dual.infeasibility <= 1e-12);
  CHECK(r.dual.tightness == 0.0);
  CHECK(r.plan.row_residual <= 1e-12);
  CHECK(r.plan.col_residual <= 1e-12);
  const auto mono = cyclical_monotonicity_check(r.plan, s->positions(), s->positions(), 2000, 1);
  CHECK(mono.worst <= 1e-12);
}

TEST_CASE("entropic solver approaches the exact cost") {
  const auto s = sample_surface(ConvexBody::unit_sphere(), 150, 2);
  const auto mu = make_measure(s, DensitySpec::uniform());
  const auto nu = make_measure(s, DensitySpec::custom([](const SurfacePoint& p) { return 1.2 + p.x[2]; }));
  const auto exact = solve_exact(mu, nu);
  EntropicOptions o;
  o.epsilon = 1e-3;
  const auto ent = solve_entropic(mu, nu, o);
  CHECK(ent.primal >= exact.primal - 1e-9);
  CHECK(ent.primal == doctest::Approx(exact.primal).epsilon(0.05));
}

TEST_CASE("c-transform follows its defining maximum") {
  const std::vector<Vec> from{Vec(1, 0, 0), Vec(0, 1, 0)};
  const std::vector<Vec> to{Vec(0, 0, 1)};
  const auto t = c_transform({0.25, -0.5}, from, to);
  REQUIRE(t.size() == 1);
  // max(-1 - 0.25, -1 + 0.5)
  CHECK(t[0] == doctest::Approx(-0.5));
}

TEST_CASE("unbalanced masses are rejected") {
  const std::vector<Vec> xs{Vec(1, 0, 0)};
  CHECK_THROWS_AS(solve_exact(xs, {1.0}, xs, {0.5}), Error);
}

TEST_CASE("measures are probability vectors with positive density") {
  const auto s = sample_surface(ConvexBody::rounded_box(Vec(1, 1, 1), 0.4), 400, 4);
  const auto m = make_measure(s, DensitySpec::two_sided(2.0, 1.0, Vec::UnitZ()));
  CHECK(std::accumulate(m.mass.begin(), m.mass.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.density_min() > 0);
  CHECK(m.density_max() / m.density_min() == doctest::Approx(2.0).epsilon(1e-9));
}
