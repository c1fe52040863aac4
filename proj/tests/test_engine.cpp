#include <doctest.h>

#include <cmath>
#include <limits>

#include "hext/cantor.hpp"
#include "hext/ext_engine.hpp"
#include "hext/set_functions.hpp"
#include "oracles.hpp"

using namespace hext;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Tolerances tight(double tol_abs, int max_level = 60) {
  Tolerances t;
  t.tol_abs = tol_abs;
  t.max_level = max_level;
  return t;
}

// First level at which the last `w` values of v(level) span at most tol.
int first_window_level(const std::function<double(int)>& v, int w, double tol, int max_level) {
  for (int l = w; l <= max_level; ++l) {
    double lo = kInf, hi = -kInf;
    for (int j = l - w + 1; j <= l; ++j) {
      lo = std::min(lo, v(j));
      hi = std::max(hi, v(j));
    }
    if (hi - lo <= tol) return l;
  }
  return -1;
}

void check_trace_contract(const ExtensionEstimate& e) {
  for (std::size_t i = 1; i < e.trace.size(); ++i) {
    CHECK(e.trace[i].level > e.trace[i - 1].level);
    CHECK(e.trace[i].gap_hi <= e.trace[i - 1].gap_hi + 1e-12);
  }
}

}  // namespace

TEST_CASE("extended-real arithmetic") {
  CHECK(ext_mul(0.0, kInf) == 0.0);
  CHECK(ext_mul(-kInf, 0.0) == 0.0);
  CHECK(ext_mul(2.0, kInf) == kInf);
  CHECK(ext_mul(-2.0, kInf) == -kInf);
  CHECK(ext_add(kInf, 5.0) == kInf);
  CHECK(ext_add(-kInf, -kInf) == -kInf);
  CHECK_THROWS_AS(ext_add(kInf, -kInf), std::domain_error);
  CHECK(ext_add(1.5, 2.5) == 4.0);
}

TEST_CASE("set functions never return NaN") {
  SetFunction bad{[](const FiniteSet&) { return std::nan(""); }, DomainClass::all, "nan"};
  CHECK_THROWS_AS(bad(make_set({1})), std::domain_error);
  SetFunction empty;
  CHECK_THROWS_AS(empty(make_set({1})), std::logic_error);
}

TEST_CASE("midpoint and diameter converge on [0,1]") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  const auto mid = estimate_ext(sf_midpoint(), unit, SamplerSpec{}, tight(1e-12));
  CHECK(mid.status == Status::converged);
  CHECK(mid.value == doctest::Approx(0.5).epsilon(1e-12));
  check_trace_contract(mid);
  const auto diam = estimate_ext(sf_diameter(unit), unit, SamplerSpec{}, tight(1e-12));
  CHECK(diam.status == Status::converged);
  CHECK(diam.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant function converges at the window length") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  auto tol = tight(1e-9);
  const auto e = estimate_ext(sf_constant(4.25), unit, SamplerSpec{}, tol);
  CHECK(e.status == Status::converged);
  CHECK(e.value == 4.25);
  CHECK(e.trace.size() == static_cast<std::size_t>(tol.window));
}

TEST_CASE("window criterion matches an independent scan") {
  const double tol = 1e-3;
  auto v = [](int l) { return 2.0 + 1.0 / (l * l); };
  const auto e = estimate_limit([&](int l) { return Rung{1.0 / l, v(l), {}}; }, tight(tol, 200));
  REQUIRE(e.status == Status::converged);
  CHECK(e.trace.back().level == first_window_level(v, 4, tol, 200));
  CHECK(std::abs(e.value - 2.0) <= 4 * tol);
  // every value inside the final window stays within tol of the estimate
  for (std::size_t i = e.trace.size() - 4; i < e.trace.size(); ++i) CHECK(std::abs(e.trace[i].value - e.value) <= tol);
}

TEST_CASE("oscillation is inconclusive with the full trace") {
  auto tol = tight(1e-6, 30);
  const auto e =
      estimate_limit([](int l) { return Rung{1.0 / l, l % 2 == 0 ? 1.0 : -1.0, {}}; }, tol);
  CHECK(e.status == Status::inconclusive);
  CHECK(e.trace.size() == 30);
}

TEST_CASE("divergence by threshold and by ramp") {
  auto tol = tight(1e-6, 200);
  tol.divergence_threshold = 1e3;
  const auto up = estimate_limit([](int l) { return Rung{1.0 / l, std::pow(2.0, l), {}}; }, tol);
  CHECK(up.status == Status::diverges_plus);
  CHECK(up.value == kInf);
  // all of the last window must be above the threshold
  for (std::size_t i = up.trace.size() - 4; i < up.trace.size(); ++i) CHECK(up.trace[i].value > 1e3);
  const auto down = estimate_limit([](int l) { return Rung{1.0 / l, -std::pow(2.0, l), {}}; }, tol);
  CHECK(down.status == Status::diverges_minus);

  // harmonic partial sums grow like log n: only the ramp rule on a doubling schedule sees it
  const auto harmonic = SpaceDescriptor::harmonic();
  auto dbl = tight(1e-6, 1 << 20);
  dbl.schedule = Schedule::doubling;
  const auto h = estimate_ext(sf_series_harmonic({[](std::int64_t i) { return 1.0 / i; }, "harmonic"}), harmonic,
                              SamplerSpec{.strategy = Strategy::prefix}, dbl);
  CHECK(h.status == Status::diverges_plus);

  // a bounded monotone climb with small steps is not mistaken for divergence
  const auto slow = estimate_limit([](int l) { return Rung{1.0 / l, 1.0 - 1.0 / l, {}}; },
                                   [] {
                                     auto t = tight(1e-4, 1 << 16);
                                     t.schedule = Schedule::doubling;
                                     return t;
                                   }());
  CHECK(slow.status != Status::diverges_plus);
}

TEST_CASE("errors carry their level") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  SetFunction fragile{[](const FiniteSet& k) {
                        if (k.size() > 3) throw std::runtime_error("too many points");
                        return 1.0;
                      },
                      DomainClass::all, "fragile"};
  try {
    estimate_ext(fragile, unit, SamplerSpec{}, tight(1e-9));
    FAIL("expected a LevelError");
  } catch (const LevelError& e) {
    CHECK(e.level() == 3);
  }
  // gap bounds must not increase
  CHECK_THROWS_AS(estimate_limit([](int l) { return Rung{static_cast<double>(l), 0.0, {}}; }, tight(1e-9)),
                  std::logic_error);
  // a non-stretched sample is a hard error
  SamplerSpec bad{.strategy = Strategy::custom};
  bad.custom = [](int) { return FiniteSet{indexed(0.25, 2), indexed(0.125, 3)}; };
  CHECK_THROWS_AS(estimate_ext_stretched(sf_constant(1), SpaceDescriptor::dyadic(1), bad, tight(1e-9)),
                  std::logic_error);
  Tolerances broken;
  broken.window = 1;
  CHECK_THROWS_AS(estimate_ext(sf_constant(1), unit, SamplerSpec{}, broken), std::invalid_argument);
}

TEST_CASE("cross check: symmetric versus shifted grid for the finite sum") {
  const auto sym = SpaceDescriptor::interval(-1, 1);
  const auto e = cross_check(sf_finite_sum(), sym, SamplerSpec{}, SamplerSpec{.strategy = Strategy::shifted_grid},
                             tight(1e-9));
  REQUIRE(e.status == Status::no_extension_evidence);
  REQUIRE(e.witness);
  // direct evaluation of the two grids at the witness level
  const int level = e.trace.back().level;
  double grid_sum = 0.0, shifted_sum = 0.0;
  for (int i = 0; i <= level; ++i) grid_sum += -1.0 + 2.0 * i / level;
  const int level2 = e.second_trace.back().level;
  for (int i = 0; i < level2; ++i) shifted_sum += -1.0 + 2.0 * (i + 0.25) / level2;
  CHECK(e.witness->value_first == doctest::Approx(grid_sum).epsilon(1e-9).scale(1));
  CHECK(e.witness->value_second == doctest::Approx(shifted_sum).epsilon(1e-9).scale(1));
  CHECK(std::abs(e.witness->value_first - e.witness->value_second) > e.tol.separation);
}

TEST_CASE("cross check: midpoint agrees across grid and random samplers") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  auto tol = tight(1e-4, 30);
  tol.separation = 1e-3;
  const auto e = cross_check(sf_midpoint(), unit, SamplerSpec{},
                             SamplerSpec{.strategy = Strategy::randomized_sdense, .seed = 3}, tol);
  CHECK(e.status == Status::converged);
  CHECK(e.value == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("cross check: Cantor mean over K and L ladders") {
  const auto cantor = SpaceDescriptor::cantor();
  auto tol = tight(1e-12, 19);
  tol.separation = 1e-6;
  const auto e = cross_check(sf_finite_mean(), cantor, SamplerSpec{.strategy = Strategy::cantor_k},
                             SamplerSpec{.strategy = Strategy::cantor_l}, tol);
  REQUIRE(e.status == Status::no_extension_evidence);
  REQUIRE(e.witness);
  CHECK(e.witness->value_first == doctest::Approx(0.5).epsilon(1e-15));
  const int n = e.second_trace.back().level + 1;
  auto l = oracle::cantor_family(n, 0, true);
  const auto l2 = oracle::cantor_family(n, 2, false);
  l.insert(l.end(), l2.begin(), l2.end());
  CHECK(e.witness->value_second == doctest::Approx(oracle::mean(l).convert_to<double>()).epsilon(1e-15));
  CHECK(exact_mean(e.witness->second) == oracle::mean(l));
}

TEST_CASE("stretched estimate agrees with the plain estimate") {
  // uniform grids are stretched: pairwise 1/n against gap 1/(2n)
  const auto unit = SpaceDescriptor::interval(0, 1);
  for (const auto& s : {sf_midpoint(), sf_diameter(unit), sf_constant(-2)}) {
    const auto plain = estimate_ext(s, unit, SamplerSpec{.strategy = Strategy::randomized_sdense, .seed = 4},
                                    tight(1e-6, 40));
    const auto str = estimate_ext_stretched(s, unit, SamplerSpec{}, tight(1e-6));
    REQUIRE(plain.status == Status::converged);
    REQUIRE(str.status == Status::converged);
    CHECK(std::abs(plain.value - str.value) <= 2e-6 + 1e-6);
  }
  const auto dyadic = SpaceDescriptor::dyadic(1);
  const auto c = estimate_ext_stretched(sf_constant(7), dyadic, SamplerSpec{.strategy = Strategy::stretched_dyadic},
                                        tight(1e-9));
  CHECK(c.status == Status::converged);
  CHECK(c.value == 7.0);
  CHECK(c.trace.size() == 4);
}

TEST_CASE("linearity of estimates") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  const auto tol = tight(1e-9);
  const auto a = estimate_ext(sf_midpoint(), unit, SamplerSpec{}, tol);
  const auto b = estimate_ext(sf_diameter(unit), unit, SamplerSpec{}, tol);
  const auto ab = estimate_ext(sf_linear(2.0, sf_midpoint(), -3.0, sf_diameter(unit)), unit, SamplerSpec{}, tol);
  REQUIRE(ab.status == Status::converged);
  CHECK(std::abs(ab.value - (2.0 * a.value - 3.0 * b.value)) <= 3 * tol.tol_abs);
}

TEST_CASE("estimate within a dense subspace") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  const auto rationals = SpaceDescriptor::rationals(0, 1);
  const auto tol = tight(1e-9);
  const auto within = estimate_ext_within(sf_midpoint(), rationals, unit, SamplerSpec{}, tol);
  const auto direct = estimate_ext(sf_midpoint(), unit, SamplerSpec{}, tol);
  REQUIRE(within.status == Status::converged);
  CHECK(within.value == doctest::Approx(direct.value));

  const auto same = estimate_ext_within(sf_midpoint(), unit, unit, SamplerSpec{}, tol);
  CHECK(same.value == direct.value);
  CHECK(same.trace.size() == direct.trace.size());

  // the subset indicator separates a rational grid from an irrational-tagged one
  const auto ind = sf_indicator_subset(rationals);
  const auto on_j = estimate_ext_within(ind, rationals, unit, SamplerSpec{}, tol);
  const auto off_j = estimate_ext_within(ind, rationals, unit, SamplerSpec{.tag_irrational = true}, tol);
  REQUIRE(on_j.status == Status::converged);
  REQUIRE(off_j.status == Status::converged);
  CHECK(on_j.value == 1.0);
  CHECK(off_j.value == 0.0);
}

TEST_CASE("class-S functions require eds samplers") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  CHECK_THROWS_AS(estimate_ext(sf_mean_eds(), unit, SamplerSpec{}, tight(1e-9)), std::invalid_argument);
  const auto e = estimate_ext(sf_mean_eds(), unit, SamplerSpec{.strategy = Strategy::eds_bins}, tight(1e-9));
  CHECK(e.status == Status::converged);
  CHECK(e.value == doctest::Approx(0.5));
}
