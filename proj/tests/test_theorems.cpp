#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hext/catalog.hpp"
#include "hext/ext_engine.hpp"
#include "hext/set_functions.hpp"

using namespace hext;

namespace {

const SpaceDescriptor kUnit = SpaceDescriptor::interval(0, 1);

Tolerances linear_tol(double tol_abs, int max_level = 60) {
  Tolerances t;
  t.tol_abs = tol_abs;
  t.max_level = max_level;
  return t;
}

Tolerances doubling_tol(double tol_abs, int max_level = 1 << 16) {
  Tolerances t;
  t.tol_abs = tol_abs;
  t.schedule = Schedule::doubling;
  t.max_level = max_level;
  return t;
}

double ext_of(const SetFunction& s, const SpaceDescriptor& h, const Tolerances& tol, SamplerSpec spec = {}) {
  const auto e = estimate_ext(s, h, spec, tol);
  REQUIRE(e.status == Status::converged);
  return e.value;
}

}  // namespace

TEST_CASE("extensions are linear") {
  const auto tol = linear_tol(1e-9);
  const auto diam = sf_diameter(kUnit);
  const double a = ext_of(sf_midpoint(), kUnit, tol);
  const double b = ext_of(diam, kUnit, tol);
  const double c = ext_of(sf_constant(4), kUnit, tol);
  for (auto [x, y] : {std::pair{1.0, 1.0}, {2.0, -3.0}, {-0.5, 0.25}}) {
    const double lhs = ext_of(sf_linear(x, sf_midpoint(), y, diam), kUnit, tol);
    CHECK(std::abs(lhs - (x * a + y * b)) <= 3 * tol.tol_abs);
    const double with_c = ext_of(sf_linear(x, sf_constant(4), y, sf_midpoint()), kUnit, tol);
    CHECK(std::abs(with_c - (x * c + y * a)) <= 3 * tol.tol_abs);
  }

  // integrals of x and x^2 combine the same way
  const auto dt = doubling_tol(1e-4);
  const auto id = sf_riemann(real_entry("identity").f, 0, 1);
  const auto sq = sf_riemann(real_entry("square").f, 0, 1);
  const double i1 = ext_of(id, kUnit, dt);
  const double i2 = ext_of(sq, kUnit, dt);
  const double mix = ext_of(sf_linear(3.0, id, -6.0, sq), kUnit, dt);
  CHECK(std::abs(mix - (3 * i1 - 6 * i2)) <= 3 * 9 * dt.tol_abs);
}

TEST_CASE("increasing functionals extend to their running supremum") {
  const auto geo = sequence_entry("geometric(0.5)");
  const auto harmonic = SpaceDescriptor::harmonic();
  const auto tol = linear_tol(1e-9, 200);
  const auto e = estimate_ext(sf_series_harmonic({geo.a, "geo"}), harmonic,
                              SamplerSpec{.strategy = Strategy::prefix}, tol);
  REQUIRE(e.status == Status::converged);
  double sup = -INFINITY;
  for (std::size_t i = 0; i < e.trace.size(); ++i) {
    if (i > 0) CHECK(e.trace[i].value >= e.trace[i - 1].value);
    sup = std::max(sup, e.trace[i].value);
  }
  CHECK(std::abs(e.value - sup) <= 3 * tol.tol_abs);
  CHECK(std::abs(e.value - 1.0) <= 3 * tol.tol_abs);
}

TEST_CASE("upper sums extend to their running infimum") {
  const auto sq = real_entry("square");
  const auto s = sf_darboux_upper(sq.f, 0, 1, sq.sup);
  const auto tol = doubling_tol(1e-3);
  const auto e = estimate_ext(s, kUnit, SamplerSpec{}, tol);
  REQUIRE(e.status == Status::converged);
  double inf = INFINITY;
  for (std::size_t i = 0; i < e.trace.size(); ++i) {
    if (i > 0) CHECK(e.trace[i].value <= e.trace[i - 1].value + 1e-15);
    inf = std::min(inf, e.trace[i].value);
  }
  CHECK(std::abs(e.value - inf) <= 3 * tol.tol_abs);
  CHECK(std::abs(e.value - 1.0 / 3.0) <= 3 * tol.tol_abs);
}

TEST_CASE("a dense subspace has the same extension") {
  const auto q = SpaceDescriptor::rationals(0, 1);
  const auto tol = linear_tol(1e-9);
  for (const auto& s : {sf_midpoint(), sf_diameter(kUnit), sf_finite_mean()}) {
    CAPTURE(s.name);
    CHECK(std::abs(ext_of(s, q, tol) - ext_of(s, kUnit, tol)) <= 3 * tol.tol_abs);
  }
}

TEST_CASE("separated unions compose through a continuous combiner") {
  const auto two = SpaceDescriptor::union_of(
      {Interval{0, 1, true, true, Density::all}, Interval{2, 3, true, true, Density::all}});
  const auto tol = linear_tol(1e-9);
  auto combine = [](double a, double b) { return a * b + std::sin(a); };
  const auto s = sf_split(combine, sf_midpoint(), [](double x) { return x <= 1.5; }, sf_midpoint(),
                          [](double x) { return x > 1.5; }, "split");
  const double left = ext_of(sf_midpoint(), kUnit, tol);
  const double right = ext_of(sf_midpoint(), SpaceDescriptor::interval(2, 3), tol);
  CHECK(std::abs(ext_of(s, two, tol) - combine(left, right)) <= 3 * tol.tol_abs);

  const auto r = sf_split([](double a, double b) { return a - b; }, sf_riemann(real_entry("square").f, 0, 1),
                          [](double x) { return x <= 1.5; }, sf_diameter(kUnit), [](double x) { return x > 1.5; },
                          "split-riemann");
  const auto dt = doubling_tol(1e-4);
  CHECK(std::abs(ext_of(r, two, dt) - (1.0 / 3.0 - 1.0)) <= 3 * dt.tol_abs);
}

TEST_CASE("ignoring a null part of the space leaves the extension alone") {
  const auto tol = linear_tol(1e-9);
  auto endpoints = [](const Point& p) { return p.x == 0.0 || p.x == 1.0; };
  const auto trimmed = sf_ignoring(sf_midpoint(), endpoints, "trimmed");
  // the first levels have only the endpoints; compare on grids with interior points
  auto t = tol;
  t.min_level = 4;
  CHECK(std::abs(ext_of(trimmed, kUnit, t) - ext_of(sf_midpoint(), kUnit, t)) <= 3 * tol.tol_abs);

  auto quarters = [](const Point& p) { return p.x == 0.25 || p.x == 0.5 || p.x == 0.75; };
  const auto sq = sf_riemann(real_entry("square").f, 0, 1);
  const auto dt = doubling_tol(1e-4);
  const double full = ext_of(sq, kUnit, dt);
  const double holed = ext_of(sf_ignoring(sq, quarters, "holed"), kUnit, dt);
  CHECK(std::abs(full - holed) <= 3 * dt.tol_abs);
}

TEST_CASE("uniformly continuous maps pull extensions back") {
  const auto tol = linear_tol(1e-9);
  const auto affine = sf_pullback(sf_midpoint(), [](double x) { return 2 * x + 1; }, "affine");
  CHECK(std::abs(ext_of(affine, kUnit, tol) - ext_of(sf_midpoint(), SpaceDescriptor::interval(1, 3), tol)) <=
        3 * tol.tol_abs);

  const auto squared = sf_pullback(sf_midpoint(), [](double x) { return x * x; }, "squared");
  const auto zero_two = SpaceDescriptor::interval(0, 2);
  CHECK(std::abs(ext_of(squared, zero_two, tol) - ext_of(sf_midpoint(), SpaceDescriptor::interval(0, 4), tol)) <=
        3 * tol.tol_abs);
}

TEST_CASE("product spaces compose coordinatewise") {
  const auto square = SpaceDescriptor::product(kUnit, kUnit);
  const auto tol = linear_tol(1e-9, 40);
  const double both = ext_of(sf_product_midpoint_sum(), square, tol);
  const double one = ext_of(sf_midpoint(), kUnit, tol);
  CHECK(std::abs(both - 2 * one) <= 3 * tol.tol_abs);

  const auto rect = SpaceDescriptor::product(kUnit, SpaceDescriptor::interval(-1, 5));
  CHECK(std::abs(ext_of(sf_product_midpoint_sum(), rect, tol) - (0.5 + 2.0)) <= 3 * tol.tol_abs);
}

TEST_CASE("uniform limits commute with the extension") {
  const auto tol = doubling_tol(1e-5, 1 << 20);
  const auto limit = ext_of(sf_riemann(real_entry("identity").f, 0, 1), kUnit, tol);
  double previous = INFINITY;
  for (int n : {1, 2, 4, 8, 16, 64, 256, 1024}) {
    const double value =
        ext_of(sf_riemann([n](double x) { return x + x / n; }, 0, 1), kUnit, tol);
    // sup |f_n - f| = 1/n bounds the gap of the integrals
    CHECK(std::abs(value - limit) <= 1.0 / n + 3 * tol.tol_abs);
    CHECK(std::abs(value - limit) <= previous + 3 * tol.tol_abs);
    previous = std::abs(value - limit);
  }
  CHECK(previous <= 1e-3);
}

TEST_CASE("continuity transfers extensions across a dense subspace") {
  const auto q = SpaceDescriptor::rationals(0, 1);
  const auto tol = linear_tol(1e-9);
  for (const auto& s : {sf_finite_mean(), sf_midpoint()}) {
    CAPTURE(s.name);
    const auto inside = estimate_ext(s, q, SamplerSpec{}, tol);
    const auto outside = estimate_ext_within(s, q, kUnit, SamplerSpec{.tag_irrational = true}, tol);
    REQUIRE(inside.status == Status::converged);
    REQUIRE(outside.status == Status::converged);
    CHECK(std::abs(inside.value - outside.value) <= 3 * tol.tol_abs);
  }
}

TEST_CASE("the extension does not depend on the sampler") {
  // shifted grids lag by O(1/N) and need long doubling ladders; the random
  // sampler is capped at level 22 and runs on a linear schedule
  auto grids = doubling_tol(1e-5, 1 << 20);
  grids.separation = 1e-4;
  auto random = linear_tol(1e-6, 22);
  random.separation = 1e-5;
  const std::vector<std::pair<SamplerSpec, Tolerances>> others{
      {SamplerSpec{.strategy = Strategy::shifted_grid}, grids},
      {SamplerSpec{.strategy = Strategy::shifted_grid, .shift = 0.5}, grids},
      {SamplerSpec{.strategy = Strategy::randomized_sdense, .seed = 1}, random},
      {SamplerSpec{.strategy = Strategy::randomized_sdense, .seed = 2}, random}};
  for (const auto& s : {sf_midpoint(), sf_diameter(kUnit)}) {
    CAPTURE(s.name);
    for (const auto& [spec, tol] : others) {
      const auto e = cross_check(s, kUnit, SamplerSpec{}, spec, tol);
      CAPTURE(spec.name());
      CHECK(e.status == Status::converged);
    }
  }
}
