#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "hext/catalog.hpp"
#include "hext/set_functions.hpp"
#include "oracles.hpp"

using namespace hext;

namespace {

FiniteSet harmonic_points(std::initializer_list<int> ns) {
  FiniteSet out;
  for (int n : ns) out.push_back(indexed(1.0 / n, n));
  return canonical(out);
}

FiniteSet dyadic_points(std::initializer_list<int> ms) {
  FiniteSet out;
  for (int m : ms) out.push_back(indexed(std::ldexp(1.0, -m), m));
  return canonical(out);
}

FiniteSet index_points(const Sequence& a, std::initializer_list<std::int64_t> idx) {
  FiniteSet out;
  for (auto i : idx) out.push_back(indexed(a(i), i));
  return canonical(out);
}

Tolerances tight(double tol_abs, int max_level = 60) {
  Tolerances t;
  t.tol_abs = tol_abs;
  t.max_level = max_level;
  return t;
}

// Riemann parity sum written out from the definition.
double riemann_oracle(const std::function<double(double)>& f, std::vector<double> h, double lo, double hi) {
  h.push_back(lo);
  h.push_back(hi);
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  const std::size_t n = h.size() - 1;
  double s = 0.0;
  std::size_t i = 1;
  for (; i + 1 <= n; i += 2) s += f(h[i]) * (h[i + 1] - h[i - 1]);
  if (n % 2 == 1) s += f(hi) * (h[n] - h[n - 1]);
  return s;
}

std::vector<double> random_points(std::mt19937_64& rng, int count, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(u(rng));
  return out;
}

FiniteSet to_set(const std::vector<double>& xs) {
  FiniteSet out;
  for (double x : xs) out.push_back(at(x));
  return canonical(out);
}

}  // namespace

TEST_CASE("series on the harmonic set") {
  const auto s = sf_series_harmonic({[](std::int64_t i) { return std::ldexp(1.0, -static_cast<int>(i)); }, "geo"});
  CHECK(s(harmonic_points({1, 2, 3})) == 0.875);
  CHECK(s(FiniteSet{}) == 0.0);
  const auto e = estimate_ext(s, SpaceDescriptor::harmonic(), SamplerSpec{.strategy = Strategy::prefix}, tight(1e-9));
  REQUIRE(e.status == Status::converged);
  CHECK(std::abs(e.value - 1.0) <= 1e-9);
  CHECK(e.trace.back().level <= 60);
}

TEST_CASE("series on the dyadic set") {
  const auto alt = sequence_entry("alternating_harmonic");
  const auto s = sf_series_dyadic({alt.a, "alt"});
  CHECK(s.domain == DomainClass::stretched);
  CHECK(s(dyadic_points({1, 2, 3})) == doctest::Approx(1.0 - 0.5 + 1.0 / 3));
  CHECK(s(dyadic_points({1})) == 1.0);
  CHECK_THROWS_AS(s(FiniteSet{at(0.3)}), std::domain_error);

  auto tol = tight(1e-2, 200);
  const auto e =
      estimate_ext_stretched(s, SpaceDescriptor::dyadic(1), SamplerSpec{.strategy = Strategy::stretched_dyadic}, tol);
  REQUIRE(e.status == Status::converged);
  // ln 2 sits between consecutive partial sums
  const int n = e.trace.back().level;
  const double p1 = oracle::alternating_harmonic_partial(n);
  const double p2 = oracle::alternating_harmonic_partial(n + 1);
  CHECK(std::min(p1, p2) <= std::numbers::ln2);
  CHECK(std::max(p1, p2) >= std::numbers::ln2);
  CHECK(std::abs(e.value - std::numbers::ln2) <= 1e-2);
}

TEST_CASE("adversarial sampler separates from the prefix ladder") {
  const auto alt = sequence_entry("alternating_harmonic");
  const auto s = sf_series_harmonic({alt.a, "alt"});
  const auto harmonic = SpaceDescriptor::harmonic();
  SamplerSpec adv{.strategy = Strategy::adversarial_tail};
  adv.adversarial = AdversarialTail{alt.a, 10, 20, 100000};
  for (int level = 1; level <= 5; ++level) {
    const auto k = refine(harmonic, adv, level);
    const auto p = refine(harmonic, SamplerSpec{.strategy = Strategy::prefix, .points_per_level = 10}, level);
    CHECK(s(k.points) - s(p.points) > 0.5);
    // the extra points do not increase the gap
    CHECK(k.gap.hi <= p.gap.hi + 1e-15);
  }
}

TEST_CASE("unordered sum on an index universe") {
  const auto zero = sequence_entry("zero");
  auto z = sf_unordered_sum(zero.a, zero.limits, zero.tail_bound);
  const auto ez = estimate_ext(z.s, z.space, SamplerSpec{.strategy = Strategy::prefix}, tight(1e-12));
  CHECK(ez.status == Status::converged);
  CHECK(ez.value == 0.0);

  const auto geo = sequence_entry("geometric(0.5)");
  auto g = sf_unordered_sum(geo.a, geo.limits, geo.tail_bound);
  const auto eg = estimate_ext(g.s, g.space, SamplerSpec{.strategy = Strategy::prefix}, tight(1e-9));
  REQUIRE(eg.status == Status::converged);
  CHECK(std::abs(eg.value - 1.0) <= 1e-9);

  // image {0, 1}: both sets below have gap 0 yet different sums
  const auto par = sequence_entry("parity");
  auto p = sf_unordered_sum(par.a, par.limits, par.tail_bound);
  SamplerSpec one{.strategy = Strategy::custom};
  one.custom = [a = par.a](int) { return index_points(a, {1, 2}); };
  SamplerSpec two{.strategy = Strategy::custom};
  two.custom = [a = par.a](int) { return index_points(a, {1, 2, 3}); };
  CHECK(gap_to_space(index_points(par.a, {1, 2}), p.space).hi == 0.0);
  const auto cc = cross_check(p.s, p.space, one, two, tight(1e-9));
  CHECK(cc.status == Status::no_extension_evidence);
  REQUIRE(cc.witness);
  CHECK(cc.witness->value_first == 1.0);
  CHECK(cc.witness->value_second == 2.0);
}

TEST_CASE("unordered mean and the existence oracle") {
  const auto spike = sequence_entry("spike");
  auto m = sf_unordered_mean(spike.a, arithmetic_mean(), spike.limits, spike.tail_bound);
  CHECK(m.s(index_points(spike.a, {1, 2})) == 0.5);
  CHECK(m.s(index_points(spike.a, {1, 2, 3})) == doctest::Approx(1.0 / 3));
  const auto c = sequence_entry("constant(2.5)");
  auto mc = sf_unordered_mean(c.a, arithmetic_mean(), c.limits, c.tail_bound);
  CHECK(mc.s(index_points(c.a, {3, 7, 11})) == 2.5);

  const auto shifted = unordered_average_oracle(sequence_entry("shifted_reciprocal(2)").a);
  CHECK(shifted.kind == AverageVerdict::Kind::exists);
  CHECK(shifted.value == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(unordered_average_oracle(sequence_entry("parity").a).kind == AverageVerdict::Kind::not_exists);
  const auto constant = unordered_average_oracle(c.a);
  CHECK(constant.kind == AverageVerdict::Kind::exists);
  CHECK(constant.value == 2.5);

  const auto reg = spot_check_regularity(arithmetic_mean(), 5);
  CHECK(reg.regular());
  MeanSpec maxmean{[](std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }, true, true, true,
                   "max"};
  CHECK_FALSE(spot_check_regularity(maxmean, 5).prefix_ok);
  MeanSpec first{[](std::span<const double> v) { return v.front(); }, true, true, true, "first"};
  CHECK_FALSE(spot_check_regularity(first, 5).permutation_ok);
}

TEST_CASE("riemann parity sums") {
  const auto tent = real_entry("tent");
  const auto s = sf_riemann(tent.f, 0, 1);
  CHECK(s(make_set({0, 0.5, 1})) == 1.0);
  const auto ident = sf_riemann([](double x) { return x; }, 0, 1);
  CHECK(ident(make_set({0, 0.5, 1})) == 0.5);
  CHECK_THROWS_AS(ident(make_set({1.5})), std::domain_error);

  std::mt19937_64 rng(8);
  const auto sq = real_entry("square");
  const auto sqs = sf_riemann(sq.f, -1, 2);
  const auto cst = sf_riemann([](double) { return 3.0; }, -1, 2);
  for (int t = 0; t < 200; ++t) {
    const auto xs = random_points(rng, t % 11, -1, 2);
    CHECK(sqs(to_set(xs)) == doctest::Approx(riemann_oracle(sq.f, xs, -1, 2)).epsilon(1e-12));
    CHECK(cst(to_set(xs)) == doctest::Approx(9.0).epsilon(1e-12));
  }

  auto tol = tight(1e-3, 10000);
  tol.step = 1000;
  tol.min_level = 1000;
  const auto e = estimate_ext(sf_riemann(sq.f, 0, 1), SpaceDescriptor::interval(0, 1), SamplerSpec{}, tol);
  REQUIRE(e.status == Status::converged);
  CHECK(std::abs(e.value - 1.0 / 3) <= 1e-3);
}

TEST_CASE("darboux upper sums") {
  const auto ind = real_entry("indicator_half");
  const auto s = sf_darboux_upper(ind.f, 0, 1, ind.sup);
  CHECK(s(make_set({0, 1})) == 1.0);
  // grids through 0.5 put it in two cells, so the sum is 2 * step
  for (double step : {0.1, 0.05, 0.04, 0.01}) {
    FiniteSet l;
    for (int i = 0; i * step <= 1.0 + 1e-12; ++i) l.push_back(at(std::min(1.0, i * step)));
    CHECK(s(canonical(l)) <= 2 * step + 1e-12);
    if (step < 0.05) CHECK(s(canonical(l)) < 0.1);
  }
  const auto c = sf_darboux_upper([](double) { return -2.0; }, 1, 4, {});
  CHECK(c(make_set({2, 3.5})) == -6.0);

  // refinement never raises an upper sum
  const auto sq = real_entry("square");
  const auto up = sf_darboux_upper(sq.f, -1, 1, sq.sup);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    auto xs = random_points(rng, 1 + t % 6, -1, 1);
    const double before = up(to_set(xs));
    const auto more = random_points(rng, 1 + t % 4, -1, 1);
    xs.insert(xs.end(), more.begin(), more.end());
    CHECK(up(to_set(xs)) <= before + 1e-12);
  }
}

TEST_CASE("polygon length") {
  const auto seg = sf_polygon_length(curve_entry("segment(1,0)"));
  CHECK(seg(make_set({0, 1})) == 1.0);
  CHECK(seg(make_set({0.3})) == doctest::Approx(1.0));
  const auto quarter = sf_polygon_length(curve_entry("quarter_circle(1)"));
  CHECK(quarter(make_set({0, 0.5, 1})) == doctest::Approx(2.0 * std::sqrt(2.0 - std::sqrt(2.0))).epsilon(1e-12));

  auto tol = tight(1e-4, 2000);
  tol.schedule = Schedule::doubling;
  const auto e = estimate_ext(quarter, SpaceDescriptor::interval(0, 1), SamplerSpec{}, tol);
  REQUIRE(e.status == Status::converged);
  CHECK(std::abs(e.value - std::numbers::pi / 2) <= 1e-4);
  for (const auto& row : e.trace) CHECK(row.value <= std::numbers::pi / 2 + 1e-12);
}

TEST_CASE("inner Jordan measure") {
  const auto h = SpaceDescriptor::union_of(
      {Interval{0, 1, true, true, Density::all}, Interval{1, 2, false, true, Density::rationals}});
  const auto s = sf_inner_jordan(h);
  CHECK(s(make_set({0, 1})) == 1.0);
  CHECK(s(make_set({0, 1.001})) == 0.0);
  CHECK(sf_inner_jordan(SpaceDescriptor::interval(0, 1))(make_set({0, 0.5, 1})) == 1.0);
}

TEST_CASE("layer sums") {
  const auto step = measure_entry("step_fixture");
  const auto s = sf_measure_integral(step.oracle, step.bound, step.variant);
  CHECK(s(make_set({1})) == 1.0);

  const auto lin = measure_entry("lebesgue_power(1)");
  const auto l = sf_measure_integral(lin.oracle, lin.bound, lin.variant);
  CHECK(l(make_set({0.5})) == 0.25);
  CHECK_THROWS_AS(l(make_set({1.5})), std::domain_error);

  // independent oracle for f(x) = x: sum of a_i (a_{i+1} - a_i)
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    auto xs = random_points(rng, 1 + t % 8, 0.001, 0.999);
    auto parts = xs;
    parts.push_back(0.0);
    parts.push_back(1.0);
    std::sort(parts.begin(), parts.end());
    double expect = 0.0;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) expect += parts[i] * (parts[i + 1] - parts[i]);
    CHECK(l(to_set(xs)) == doctest::Approx(expect).epsilon(1e-12));
  }

  // oracle additivity and sign
  MeasureOracle broken{[](double, double) { return 1.0; }, 1.0, "broken"};
  CHECK_THROWS_AS(sf_measure_integral(broken, 1.0, LayerVariant::nonneg)(make_set({0.5})), std::logic_error);
  MeasureOracle negative{[](double, double) { return -1.0; }, 1.0, "negative"};
  CHECK_THROWS_AS(sf_measure_integral(negative, 1.0, LayerVariant::nonneg)(make_set({0.5})), std::logic_error);

  // signed variant inserts 0 into the partition
  const auto sgn = measure_entry("signed_identity");
  const auto ss = sf_measure_integral(sgn.oracle, sgn.bound, sgn.variant);
  CHECK(ss(make_set({0.5})) == doctest::Approx(-1.0 + 0.25));
  CHECK_THROWS_AS(ss(make_set({0.0})), std::domain_error);

  // counting measure with f(n) = 2^-n on the half-line variant
  const auto cnt = measure_entry("counting_geometric(0.5)");
  const auto cs = sf_measure_integral(cnt.oracle, cnt.bound, cnt.variant);
  // layers: [0.25, 0.5) holds n = 2, [0.5, inf) holds n = 1
  CHECK(cs(make_set({0.25, 0.5})) == doctest::Approx(0.25 + 0.5));

  // layer sums grow with the set
  for (int t = 0; t < 100; ++t) {
    auto xs = random_points(rng, 1 + t % 5, 0.001, 0.999);
    const double before = l(to_set(xs));
    const auto more = random_points(rng, 1 + t % 3, 0.001, 0.999);
    xs.insert(xs.end(), more.begin(), more.end());
    CHECK(l(to_set(xs)) >= before - 1e-12);
  }
}

TEST_CASE("measure oracle additivity across adjacent intervals") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& name : {"lebesgue_power(2)", "step_fixture", "signed_identity", "neg_log"}) {
    const auto m = measure_entry(name);
    for (int t = 0; t < 100; ++t) {
      double a = u(rng), b = u(rng), c = u(rng);
      if (m.variant == LayerVariant::signed_range) {
        a = 2 * a - 1;
        b = 2 * b - 1;
        c = 2 * c - 1;
      }
      std::array<double, 3> v{a, b, c};
      std::sort(v.begin(), v.end());
      const double whole = m.oracle.layer(v[0], v[2]);
      CHECK(whole == doctest::Approx(m.oracle.layer(v[0], v[1]) + m.oracle.layer(v[1], v[2])).epsilon(1e-12));
      CHECK(m.oracle.layer(v[0], v[1]) >= 0.0);
      CHECK(m.oracle.layer(v[0], v[1]) <= whole + 1e-15);
    }
  }
}

TEST_CASE("isolated-point means") {
  auto tol = tight(1e-3, 40);
  const auto harm = mean_iso_limit(iso_entry("harmonic_zero"), tol);
  REQUIRE(harm.status == Status::converged);
  CHECK(std::abs(harm.value) <= 1e-3);

  const auto finite = iso_entry("finite(0.2, 0.4, 0.9)");
  for (double d : {1.0, 0.1, 1e-6}) CHECK(mean_iso(finite, d) == doctest::Approx(0.5));

  const auto two = mean_iso_limit(iso_entry("two_sided"), tight(1e-9, 40));
  REQUIRE(two.status == Status::converged);
  CHECK(two.value == doctest::Approx(0.5).epsilon(1e-9));

  // mean of {1/n : 1/n >= d}: a harmonic number over a count
  for (int n : {4, 16, 100}) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / i;
    CHECK(mean_iso(iso_entry("harmonic_zero"), 1.0 / n) == doctest::Approx(h / n).epsilon(1e-12));
  }
}

TEST_CASE("block arrangement keeps running means in the window") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> val(-0.999, 0.999);
  std::uniform_int_distribution<int> len(0, 20);
  const double bound = 1.0;
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> prefix(static_cast<std::size_t>(len(rng)));
    for (auto& x : prefix) x = val(rng);
    std::vector<double> block(static_cast<std::size_t>(1 + len(rng)));
    for (auto& x : block) x = val(rng);
    const auto arranged = arrange_blocks(prefix, block, bound);
    REQUIRE(arranged.size() == block.size());
    CHECK(std::is_permutation(arranged.begin(), arranged.end(), block.begin()));
    const double all = std::accumulate(prefix.begin(), prefix.end(), 0.0) +
                       std::accumulate(block.begin(), block.end(), 0.0);
    const double b = all / static_cast<double>(prefix.size() + block.size());
    const double a = prefix.empty() ? b : std::accumulate(prefix.begin(), prefix.end(), 0.0) / prefix.size();
    const double slack = 2 * bound / static_cast<double>(prefix.size() + 1);
    double sum = std::accumulate(prefix.begin(), prefix.end(), 0.0);
    std::size_t count = prefix.size();
    for (double x : arranged) {
      sum += x;
      ++count;
      const double m = sum / static_cast<double>(count);
      if (m <= std::min(a, b) - slack || m >= std::max(a, b) + slack) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("arranged iso sequences have small running-mean steps") {
  const auto spec = iso_entry("two_sided");
  const auto seq = arrange_iso_sequence(spec, 2000);
  REQUIRE(seq.size() == 2000);
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    sum += seq[n - 1];
    const double m = sum / static_cast<double>(n);
    if (n > 1) CHECK(std::abs(m - prev) < 2 * spec.bound / static_cast<double>(n));
    prev = m;
  }
  CHECK(std::abs(prev - 0.5) < 0.05);
  const auto constant = arrange_iso_sequence(iso_entry("finite(0.3, 0.3)"), 2);
  for (double x : constant) CHECK(x == 0.3);
}

TEST_CASE("eds means") {
  const auto unit = SpaceDescriptor::interval(0, 1);
  auto tol = tight(1e-6, 10000);
  tol.schedule = Schedule::doubling;
  const auto mid = mean_eds_limit(unit, tol);
  REQUIRE(mid.status == Status::converged);
  CHECK(std::abs(mid.value - 0.5) <= 1e-6);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto rt = tight(1e-2, 22);
    const auto r = mean_eds_limit(unit, rt, EdsRule::random, seed);
    CHECK(std::abs(r.value - 0.5) <= 1e-2);
  }

  const auto two = SpaceDescriptor::union_of(
      {Interval{0, 0, true, true, Density::all}, Interval{1, 1, true, true, Density::all}});
  const auto e2 = mean_eds_limit(two, tight(1e-12));
  REQUIRE(e2.status == Status::converged);
  CHECK(e2.value == 0.5);

  const auto split = SpaceDescriptor::union_of(
      {Interval{0, 1, true, true, Density::all}, Interval{2, 3, true, true, Density::all}});
  const auto es = mean_eds_limit(split, tol);
  REQUIRE(es.status == Status::converged);
  CHECK(std::abs(es.value - 1.5) <= 1e-6);
}

TEST_CASE("sequence limit functional") {
  const auto harmonic = SpaceDescriptor::harmonic();
  const auto rec = estimate_ext(sf_sequence_limit([](std::int64_t n) { return 1.0 / n; }), harmonic,
                                SamplerSpec{.strategy = Strategy::prefix}, [] {
                                  auto t = tight(1e-4, 1 << 20);
                                  t.schedule = Schedule::doubling;
                                  return t;
                                }());
  REQUIRE(rec.status == Status::converged);
  CHECK(std::abs(rec.value) <= 1e-3);
  const auto c = estimate_ext(sf_sequence_limit([](std::int64_t) { return -4.0; }), harmonic,
                              SamplerSpec{.strategy = Strategy::prefix}, tight(1e-12));
  CHECK(c.value == -4.0);
  const auto alt = cross_check(sf_sequence_limit([](std::int64_t n) { return n % 2 == 0 ? 1.0 : -1.0; }), harmonic,
                               SamplerSpec{.strategy = Strategy::prefix, .parity = PrefixParity::even},
                               SamplerSpec{.strategy = Strategy::prefix, .parity = PrefixParity::odd}, tight(1e-9));
  CHECK(alt.status == Status::no_extension_evidence);
  REQUIRE(alt.witness);
  CHECK(alt.witness->value_first == 1.0);
  CHECK(alt.witness->value_second == -1.0);
}

TEST_CASE("catalog parsing") {
  const auto f = parse_formula(" power( 2.5 ) ");
  CHECK(f.name == "power");
  CHECK(f.args == std::vector<double>{2.5});
  CHECK_THROWS_AS(parse_formula("power(2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_formula("power(x)"), std::invalid_argument);
  CHECK_THROWS_AS(sequence_entry("nosuch"), std::invalid_argument);
  CHECK_THROWS_AS(sequence_entry("geometric(2)"), std::invalid_argument);
  CHECK_THROWS_AS(real_entry("linear(1,2,3)"), std::invalid_argument);
  CHECK_FALSE(catalog_names("measure").empty());
  // tail bounds really bound the distance to the limits
  for (const auto& name : {"geometric(0.5)", "alternating_harmonic", "harmonic", "shifted_reciprocal(3)", "parity_decay"}) {
    const auto e = sequence_entry(name);
    for (std::int64_t r : {0, 5, 50}) {
      for (std::int64_t i = r + 1; i <= r + 200; ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (double lim : e.limits) d = std::min(d, std::abs(e.a(i) - lim));
        CHECK(d <= e.tail_bound(r) + 1e-15);
      }
    }
  }
}
