#include "hext/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hext/cantor.hpp"

namespace hext {

namespace {

[[noreturn]] void mismatch(const SamplerSpec& spec, const SpaceDescriptor& space) {
  throw std::invalid_argument("sampler/space kind mismatch: " + spec.name() + " on " + space.name());
}

Point tag(Point p, bool irrational) {
  p.irrational = irrational;
  return p;
}

void grid_interval(const Interval& iv, std::int64_t n, bool irrational, FiniteSet& out) {
  if (irrational && iv.density == Density::rationals)
    throw std::invalid_argument("grid: irrational tags on a rationals-only interval");
  const bool irr = irrational || iv.density == Density::irrationals;
  const double len = iv.hi - iv.lo;
  if (len == 0.0) {
    if (interval_holds(iv, iv.lo)) out.push_back(tag(at(iv.lo), irr));
    return;
  }
  for (std::int64_t i = 0; i <= n; ++i) {
    const double x = iv.lo + len * static_cast<double>(i) / static_cast<double>(n);
    if (interval_holds(iv, x)) out.push_back(tag(at(x), irr));
  }
}

FiniteSet line_grid(const SpaceDescriptor& space, std::int64_t n, bool irrational, const SamplerSpec& spec) {
  FiniteSet out;
  if (const auto* iv = std::get_if<Interval>(&space.kind())) {
    grid_interval(*iv, n, irrational, out);
  } else if (const auto* un = std::get_if<UnionOfIntervals>(&space.kind())) {
    double total = 0.0;
    for (const auto& p : un->pieces) total += p.hi - p.lo;
    for (const auto& p : un->pieces) {
      const double share = total > 0.0 ? (p.hi - p.lo) / total : 1.0;
      const auto np = std::max<std::int64_t>(1, std::llround(static_cast<double>(n) * share));
      grid_interval(p, np, irrational, out);
    }
  } else {
    mismatch(spec, space);
  }
  return canonical(std::move(out));
}

FiniteSet product_of(const FiniteSet& a, const FiniteSet& b) {
  FiniteSet out;
  out.reserve(a.size() * b.size());
  for (const auto& p : a)
    for (const auto& q : b) {
      Point r = planar(p.x, q.x);
      r.irrational = p.irrational;
      out.push_back(r);
    }
  return canonical(std::move(out));
}

std::int64_t prefix_length(const SamplerSpec& spec, int level) {
  switch (spec.parity) {
    case PrefixParity::even: return 2 * static_cast<std::int64_t>(level);
    case PrefixParity::odd: return 2 * static_cast<std::int64_t>(level) + 1;
    case PrefixParity::any: break;
  }
  return static_cast<std::int64_t>(level) * spec.points_per_level;
}

FiniteSet sequence_prefix(const SpaceDescriptor& space, std::int64_t n, const SamplerSpec& spec) {
  FiniteSet out;
  if (const auto* h = std::get_if<HarmonicSet>(&space.kind())) {
    out.reserve(static_cast<std::size_t>(n) + h->extra.size());
    for (std::int64_t i = 1; i <= n; ++i) out.push_back(indexed(1.0 / static_cast<double>(i), i));
    for (double e : h->extra) out.push_back(at(e));
  } else if (const auto* d = std::get_if<DyadicSet>(&space.kind())) {
    for (std::int64_t m = d->first_exponent; m < d->first_exponent + n && m < 1070; ++m)
      out.push_back(indexed(std::ldexp(1.0, -static_cast<int>(m)), m));
  } else if (const auto* f = std::get_if<FunctionInduced>(&space.kind())) {
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = f->first; i < f->first + n; ++i) out.push_back(indexed(f->a(i), i));
  } else {
    mismatch(spec, space);
  }
  return canonical(std::move(out));
}

FiniteSet random_stream(const SpaceDescriptor& space, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FiniteSet out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    if (auto p = space.random_member(rng)) out.push_back(*p);
  return out;
}

FiniteSet cantor_level_set(int n) {
  return cantor_samples(n).k;
}

FiniteSet nested_random(const SpaceDescriptor& space, int level, const SamplerSpec& spec) {
  if (level > 22) throw std::invalid_argument("randomized_sdense: level beyond 22");
  const std::size_t cells = std::size_t{1} << level;
  FiniteSet out;
  if (space.is_product()) {
    if (level > 11) throw std::invalid_argument("randomized_sdense: product level beyond 11");
    SamplerSpec inner = spec;
    auto a = nested_random(space.first_factor(), level, inner);
    inner.seed = spec.seed + 1;
    auto b = nested_random(space.second_factor(), level, inner);
    return product_of(a, b);
  }
  if (std::holds_alternative<Interval>(space.kind()) || std::holds_alternative<UnionOfIntervals>(space.kind())) {
    const double lo = space.infimum();
    const double len = space.supremum() - lo;
    for (std::size_t i = 0; i <= cells; ++i) {
      const double x = lo + len * static_cast<double>(i) / static_cast<double>(cells);
      if (auto p = space.member_at(x)) out.push_back(*p);
    }
    auto extra = random_stream(space, cells, spec.seed);
    out.insert(out.end(), extra.begin(), extra.end());
  } else if (std::holds_alternative<CantorTernary>(space.kind())) {
    out = cantor_level_set(level + 1);
    auto extra = random_stream(space, cells, spec.seed);
    out.insert(out.end(), extra.begin(), extra.end());
  } else if (std::holds_alternative<HarmonicSet>(space.kind()) || std::holds_alternative<DyadicSet>(space.kind()) ||
             std::holds_alternative<FunctionInduced>(space.kind())) {
    out = sequence_prefix(space, level, spec);
    auto extra = random_stream(space, static_cast<std::size_t>(level), spec.seed);
    out.insert(out.end(), extra.begin(), extra.end());
  } else {
    mismatch(spec, space);
  }
  return canonical(std::move(out));
}

FiniteSet halfline_grid(std::int64_t n) {
  const double h = 1.0 / static_cast<double>(n + 1);
  const auto count = static_cast<std::int64_t>(std::ceil(1.0 / (h * h))) + 1;
  FiniteSet out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 1; i <= count; ++i) out.push_back(at(h * static_cast<double>(i)));
  return out;
}

// Whether [u, v) (or [u, v] when closed) holds a member, and one such member.
std::optional<Point> bin_member(const SpaceDescriptor& space, double u, double v, bool closed) {
  const Meet m = space.meets(u, v);
  if (m == Meet::unknown) throw UnresolvedError("eds_bins: bin membership near an unresolved accumulation value");
  if (m == Meet::no) return std::nullopt;
  if (auto p = space.member_at(u)) return p;
  if (auto p = space.member_in_open(u, v)) return p;
  if (closed)
    if (auto p = space.member_at(v)) return p;
  return std::nullopt;
}

bool in_bin(double x, double u, double v, bool closed) { return x >= u && (x < v || (closed && x == v)); }

std::optional<Point> bin_representative(const SpaceDescriptor& space, double u, double v, bool closed,
                                        EdsRule rule, std::mt19937_64& rng) {
  auto any = bin_member(space, u, v, closed);
  if (!any) return std::nullopt;
  auto member_if_in_bin = [&](std::optional<double> x) -> std::optional<Point> {
    if (!x || !in_bin(*x, u, v, closed)) return std::nullopt;
    return space.member_at(*x);
  };
  switch (rule) {
    case EdsRule::midpoint: {
      const double c = u + (v - u) / 2.0;
      if (auto p = space.member_at(c)) return p;
      auto f = member_if_in_bin(space.closure_floor(c));
      auto g = member_if_in_bin(space.closure_ceil(c));
      if (f && g) return (c - f->x <= g->x - c) ? f : g;
      if (f) return f;
      if (g) return g;
      return any;
    }
    case EdsRule::infimum_side: {
      if (auto g = member_if_in_bin(space.closure_ceil(u))) return g;
      return any;
    }
    case EdsRule::random: {
      if (auto p = space.random_member_in(u, v, rng)) return p;
      return any;
    }
  }
  return any;
}

}  // namespace

std::string SamplerSpec::name() const {
  if (!label.empty()) return label;
  switch (strategy) {
    case Strategy::uniform_grid: return "uniform-grid";
    case Strategy::shifted_grid: return "shifted-grid";
    case Strategy::prefix:
      return parity == PrefixParity::even ? "prefix-even" : parity == PrefixParity::odd ? "prefix-odd" : "prefix";
    case Strategy::stretched_dyadic: return "stretched-dyadic";
    case Strategy::randomized_sdense: return "randomized-sdense(" + std::to_string(seed) + ")";
    case Strategy::eds_bins: return "eds-bins";
    case Strategy::cantor_k: return "cantor-K";
    case Strategy::cantor_l: return "cantor-L";
    case Strategy::adversarial_tail: return "adversarial-tail";
    case Strategy::halfline_grid: return "halfline-grid";
    case Strategy::custom: return "custom";
  }
  return "unknown";
}

Sample refine(const SpaceDescriptor& space, const SamplerSpec& spec, int level) {
  if (level < 1) throw std::domain_error("refine: level must be at least 1");
  if (spec.points_per_level < 1) throw std::domain_error("refine: points_per_level must be positive");
  const std::int64_t n = static_cast<std::int64_t>(level) * spec.points_per_level;
  Sample out;
  std::optional<GapBound> gap;
  switch (spec.strategy) {
    case Strategy::uniform_grid:
      if (space.is_product()) {
        SamplerSpec inner = spec;
        out.points = product_of(line_grid(space.first_factor(), n, spec.tag_irrational, inner),
                                line_grid(space.second_factor(), n, spec.tag_irrational, inner));
      } else {
        out.points = line_grid(space, n, spec.tag_irrational, spec);
      }
      break;
    case Strategy::shifted_grid: {
      const auto* iv = std::get_if<Interval>(&space.kind());
      if (!iv) mismatch(spec, space);
      const double len = iv->hi - iv->lo;
      for (std::int64_t i = 0; i < n; ++i) {
        const double x = iv->lo + len * (static_cast<double>(i) + spec.shift) / static_cast<double>(n);
        if (interval_holds(*iv, x)) out.points.push_back(tag(at(x), spec.tag_irrational || iv->density == Density::irrationals));
      }
      out.points = canonical(std::move(out.points));
      break;
    }
    case Strategy::prefix:
      out.points = sequence_prefix(space, prefix_length(spec, level), spec);
      break;
    case Strategy::stretched_dyadic: {
      const auto* d = std::get_if<DyadicSet>(&space.kind());
      if (!d) mismatch(spec, space);
      for (int m = d->first_exponent; m <= std::max(level, d->first_exponent) && m < 1070; ++m)
        out.points.push_back(indexed(std::ldexp(1.0, -m), m));
      out.points = canonical(std::move(out.points));
      if (!is_stretched(out.points, space)) throw std::logic_error("stretched-dyadic sampler produced a non-stretched set");
      break;
    }
    case Strategy::randomized_sdense:
      out.points = nested_random(space, level, spec);
      break;
    case Strategy::eds_bins:
      if (!space.is_line() || space.is_half_line()) mismatch(spec, space);
      if (spec.eds_rule == EdsRule::random) {
        out.points = eds_bins_nested_random(space, level, spec.seed);
      } else {
        std::mt19937_64 rng(spec.seed);
        out.points = eds_bins(space, static_cast<int>(n), spec.eds_rule, rng);
      }
      break;
    case Strategy::cantor_k:
    case Strategy::cantor_l: {
      if (!std::holds_alternative<CantorTernary>(space.kind())) mismatch(spec, space);
      auto s = cantor_samples(level + 1);
      out.points = spec.strategy == Strategy::cantor_k ? std::move(s.k) : std::move(s.l);
      const double g = exact_cantor_gap(out.points).convert_to<double>();
      gap = GapBound{g, g};
      break;
    }
    case Strategy::adversarial_tail:
      if (!std::holds_alternative<HarmonicSet>(space.kind())) mismatch(spec, space);
      out.points = adversarial_series_sampler(spec.adversarial, level);
      break;
    case Strategy::halfline_grid: {
      if (!space.is_half_line()) mismatch(spec, space);
      out.points = halfline_grid(n);
      const double g = halfline_density(out.points);
      gap = GapBound{g, g};
      break;
    }
    case Strategy::custom:
      if (!spec.custom) throw std::invalid_argument("custom sampler without a generator");
      out.points = canonical(spec.custom(level));
      if (space.is_half_line()) {
        const double g = halfline_density(out.points);
        gap = GapBound{g, g};
      }
      break;
  }
  out.gap = gap ? *gap : gap_to_space(out.points, space);
  return out;
}

FiniteSet eds_bins(const SpaceDescriptor& space, int bins, EdsRule rule, std::mt19937_64& rng) {
  if (bins < 1) throw std::domain_error("eds_bins: need at least one bin");
  if (!space.is_line() || space.is_half_line()) throw std::invalid_argument("eds_bins: bounded line space required");
  const double a = space.infimum();
  const double b = space.supremum();
  FiniteSet out;
  if (a == b) {
    if (auto p = space.member_at(a)) out.push_back(*p);
    return out;
  }
  const double w = (b - a) / static_cast<double>(bins);
  for (int i = 0; i < bins; ++i) {
    const double u = a + w * static_cast<double>(i);
    const bool last = i == bins - 1;
    const double v = last ? b : a + w * static_cast<double>(i + 1);
    if (auto p = bin_representative(space, u, v, last, rule, rng)) out.push_back(*p);
  }
  return canonical(std::move(out));
}

FiniteSet eds_bins_nested_random(const SpaceDescriptor& space, int level, std::uint64_t seed) {
  if (level < 0 || level > 24) throw std::domain_error("eds_bins_nested_random: level out of range");
  const double a = space.infimum();
  const double b = space.supremum();
  std::mt19937_64 rng(seed);
  if (a == b) {
    FiniteSet out;
    if (auto p = space.member_at(a)) out.push_back(*p);
    return out;
  }
  auto edge = [&](std::size_t i, std::size_t count) {
    if (i == count) return b;
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(count);
  };
  std::vector<std::optional<Point>> reps{bin_representative(space, a, b, true, EdsRule::random, rng)};
  for (int l = 1; l <= level; ++l) {
    const std::size_t count = std::size_t{1} << l;
    std::vector<std::optional<Point>> next(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double u = edge(i, count);
      const double v = edge(i + 1, count);
      const bool closed = i + 1 == count;
      const auto& parent = reps[i / 2];
      if (parent && in_bin(parent->x, u, v, closed))
        next[i] = parent;
      else
        next[i] = bin_representative(space, u, v, closed, EdsRule::random, rng);
    }
    reps = std::move(next);
  }
  FiniteSet out;
  for (const auto& r : reps)
    if (r) out.push_back(*r);
  return canonical(std::move(out));
}

FiniteSet adversarial_series_sampler(const AdversarialTail& tail, int level) {
  if (!tail.a) throw std::invalid_argument("adversarial sampler: missing sequence");
  const std::int64_t n = static_cast<std::int64_t>(tail.prefix_per_level) * level;
  const std::int64_t k = static_cast<std::int64_t>(tail.extra_per_level) * level;
  FiniteSet out;
  for (std::int64_t i = 1; i <= n; ++i) out.push_back(indexed(1.0 / static_cast<double>(i), i));
  if (k > 0) {
    std::vector<std::pair<double, std::int64_t>> positive;
    for (std::int64_t i = n + 1; i <= n + tail.horizon; ++i) {
      const double v = tail.a(i);
      if (v > 0.0) positive.emplace_back(v, i);
    }
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), positive.size());
    std::partial_sort(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(take), positive.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
    for (std::size_t j = 0; j < take; ++j)
      out.push_back(indexed(1.0 / static_cast<double>(positive[j].second), positive[j].second));
  }
  return canonical(std::move(out));
}

FiniteSet random_subset(const SpaceDescriptor& space, std::size_t count, std::mt19937_64& rng) {
  FiniteSet out;
  for (std::size_t tries = 0; out.size() < count && tries < 20 * count + 20; ++tries) {
    if (auto p = space.random_member(rng)) {
      out.push_back(*p);
      out = canonical(std::move(out));
    }
  }
  return out;
}

FiniteSet random_sdense(const SpaceDescriptor& space, double delta, std::mt19937_64& rng) {
  if (!(delta > 0.0)) throw std::domain_error("random_sdense: delta must be positive");
  if (space.is_product()) {
    auto a = random_sdense(space.first_factor(), delta / 2.0, rng);
    auto b = random_sdense(space.second_factor(), delta / 2.0, rng);
    return product_of(a, b);
  }
  if (space.is_half_line()) throw std::invalid_argument("random_sdense: half-line is not totally bounded");
  const double a = space.infimum();
  const double b = space.supremum();
  const double c = 0.9 * delta;
  const double pad = 0.05 * c;
  FiniteSet out;
  for (double u = a; u <= b; u += c) {
    const double v = u + c;
    auto p = space.random_member_in(u - pad, v + pad, rng);
    if (!p && space.meets(u - pad, v + pad) != Meet::no) p = space.member_in_open(u - pad, v + pad);
    if (!p) p = space.member_at(u);
    if (p) out.push_back(*p);
  }
  std::bernoulli_distribution coin(0.5);
  if (coin(rng)) {
    std::uniform_int_distribution<std::size_t> extra(0, out.size() / 2 + 1);
    for (std::size_t i = extra(rng); i > 0; --i)
      if (auto p = space.random_member(rng)) out.push_back(*p);
  }
  // Tag pattern for intervals admitting both kinds of reals.
  const auto* iv = std::get_if<Interval>(&space.kind());
  if (iv && iv->density == Density::all) {
    std::uniform_int_distribution<int> mode(0, 2);
    const int m = mode(rng);
    if (m < 2)
      for (auto& p : out) p.irrational = m == 1;
  }
  out = canonical(std::move(out));
  if (!is_sdense(out, space, delta)) throw UnresolvedError("random_sdense: could not certify the gap");
  return out;
}

std::optional<FiniteSet> perturb(const SpaceDescriptor& space, const FiniteSet& h, double delta, PerturbMode mode,
                                 std::mt19937_64& rng) {
  if (h.empty() || !(delta > 0.0)) return std::nullopt;
  const double r = 0.9 * delta;
  enum class Side { both, below, above };
  auto near = [&](const Point& p, Side side) -> std::optional<Point> {
    if (space.is_product()) {
      auto a = space.first_factor().random_member_in(p.x - r / 2.0, p.x + r / 2.0, rng);
      auto b = space.second_factor().random_member_in(p.y - r / 2.0, p.y + r / 2.0, rng);
      if (!a || !b) return std::nullopt;
      return planar(a->x, b->x);
    }
    std::bernoulli_distribution stay(0.2);
    if (stay(rng) && space.contains(p)) return p;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double lo = side == Side::above ? std::nextafter(p.x, -inf) : p.x - r;
    const double hi = side == Side::below ? std::nextafter(p.x, inf) : p.x + r;
    auto q = space.random_member_in(lo, hi, rng);
    if (!q && space.contains(p)) return p;
    return q;
  };
  const Side side = mode == PerturbMode::downward || mode == PerturbMode::upward_weak ? Side::below
                    : mode == PerturbMode::upward                                     ? Side::above
                                                                                      : Side::both;
  const bool fixed_size = mode == PerturbMode::same_size || mode == PerturbMode::upward;
  for (int attempt = 0; attempt < 20; ++attempt) {
    FiniteSet k;
    bool ok = true;
    for (const auto& p : h) {
      auto q = near(p, side);
      if (!q) {
        ok = false;
        break;
      }
      k.push_back(*q);
    }
    if (!ok) continue;
    if (!fixed_size) {
      std::uniform_int_distribution<int> extras(0, 3);
      std::uniform_int_distribution<std::size_t> pick(0, h.size() - 1);
      for (int e = extras(rng); e > 0; --e)
        if (auto q = near(h[pick(rng)], mode == PerturbMode::downward ? Side::below : Side::both)) k.push_back(*q);
    }
    k = canonical(std::move(k));
    if (fixed_size && k.size() != h.size()) continue;
    if (hausdorff_finite(h, k, space) >= delta) continue;
    return k;
  }
  return std::nullopt;
}

}  // namespace hext
