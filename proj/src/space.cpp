#include "hext/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Point tagged_for(Density d, double x) {
  return d == Density::irrationals ? at_irrational(x) : at(x);
}

// ---- intervals ------------------------------------------------------------

std::optional<double> iv_floor(const Interval& iv, double x) {
  if (x < iv.lo) return std::nullopt;
  return std::min(x, iv.hi);
}

std::optional<double> iv_ceil(const Interval& iv, double x) {
  if (x > iv.hi) return std::nullopt;
  return std::max(x, iv.lo);
}

Meet iv_meets(const Interval& iv, double p, double q) {
  const double lo = std::max(p, iv.lo);
  const double hi = std::min(q, iv.hi);
  if (lo < hi) return Meet::yes;
  if (lo == hi && interval_holds(iv, lo) && iv.density != Density::irrationals) return Meet::yes;
  return Meet::no;
}

std::optional<Point> iv_member_in_open(const Interval& iv, double u, double v) {
  const double lo = std::max(u, iv.lo);
  const double hi = std::min(v, iv.hi);
  if (lo < hi) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid > u && mid < v && interval_holds(iv, mid)) return tagged_for(iv.density, mid);
    return std::nullopt;
  }
  if (lo == hi && lo > u && lo < v && interval_holds(iv, lo) &&
      iv.density != Density::irrationals)
    return at(lo);
  return std::nullopt;
}

std::optional<Point> iv_random_in(const Interval& iv, double u, double v, std::mt19937_64& rng) {
  const double lo = std::max(u, iv.lo);
  const double hi = std::min(v, iv.hi);
  if (lo > hi) return std::nullopt;
  if (lo == hi) {
    if (lo > u && lo < v && interval_holds(iv, lo)) return at(lo);
    return std::nullopt;
  }
  std::uniform_real_distribution<double> dist(lo, hi);
  double x = dist(rng);
  for (int tries = 0; tries < 64 && !(x > u && x < v && interval_holds(iv, x)); ++tries)
    x = dist(rng);
  if (!(x > u && x < v && interval_holds(iv, x))) return std::nullopt;
  switch (iv.density) {
    case Density::rationals: return at(x);
    case Density::irrationals: return at_irrational(x);
    case Density::all: {
      std::bernoulli_distribution coin(0.5);
      return coin(rng) ? at_irrational(x) : at(x);
    }
  }
  return at(x);
}

FiniteSet iv_probes(const Interval& iv, double spacing) {
  const double len = iv.hi - iv.lo;
  if (len <= 0.0) {
    if (interval_holds(iv, iv.lo)) return {tagged_for(iv.density, iv.lo)};
    return {};
  }
  const auto n = static_cast<std::int64_t>(std::max(1.0, std::ceil(len / spacing - 1e-9)));
  FiniteSet out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (std::int64_t i = 0; i <= n; ++i) {
    double x = iv.lo + len * static_cast<double>(i) / static_cast<double>(n);
    if (i == 0 && !iv.closed_lo) x = iv.lo + len / (2.0 * static_cast<double>(n));
    if (i == n && !iv.closed_hi) x = iv.hi - len / (2.0 * static_cast<double>(n));
    out.push_back(tagged_for(iv.density, x));
  }
  return canonical(std::move(out));
}

// ---- harmonic {1/n} -------------------------------------------------------

// Largest 1/n <= x, for x > 0.
double harmonic_index_below(double x) {
  if (x >= 1.0) return 1.0;
  double n = std::ceil(1.0 / x);
  while (1.0 / n > x) n += 1.0;
  while (n > 1.0 && 1.0 / (n - 1.0) <= x) n -= 1.0;
  return n;
}

// Smallest 1/n >= x, for 0 < x <= 1.
double harmonic_index_above(double x) {
  double n = std::floor(1.0 / x);
  if (n < 1.0) n = 1.0;
  while (n > 1.0 && 1.0 / n < x) n -= 1.0;
  while (1.0 / (n + 1.0) >= x) n += 1.0;
  return n;
}

Point harmonic_point(double n) { return indexed(1.0 / n, static_cast<std::int64_t>(n)); }

std::optional<double> harmonic_floor(const HarmonicSet& h, double x) {
  std::optional<double> best;
  if (x >= 0.0) best = x > 0.0 ? 1.0 / harmonic_index_below(x) : 0.0;
  for (double e : h.extra)
    if (e <= x && (!best || e > *best)) best = e;
  return best;
}

std::optional<double> harmonic_ceil(const HarmonicSet& h, double x) {
  std::optional<double> best;
  if (x <= 0.0)
    best = 0.0;
  else if (x <= 1.0)
    best = 1.0 / harmonic_index_above(x);
  for (double e : h.extra)
    if (e >= x && (!best || e < *best)) best = e;
  return best;
}

std::optional<Point> harmonic_member_in_open(const HarmonicSet& h, double u, double v) {
  std::optional<Point> best;
  if (v > 0.0 && u < 1.0) {
    double n = v > 1.0 ? 1.0 : std::floor(1.0 / v) + 1.0;
    while (n > 1.0 && 1.0 / (n - 1.0) < v) n -= 1.0;
    while (1.0 / n >= v) n += 1.0;
    if (1.0 / n > u) best = harmonic_point(n);
  }
  for (double e : h.extra)
    if (e > u && e < v && (!best || e > best->x)) best = at(e);
  return best;
}

// ---- dyadic {2^-m} --------------------------------------------------------

Point dyadic_point(int m) { return indexed(std::ldexp(1.0, -m), m); }

std::optional<double> dyadic_floor(const DyadicSet& d, double x) {
  const double top = std::ldexp(1.0, -d.first_exponent);
  if (x < 0.0) return std::nullopt;
  if (x == 0.0) return 0.0;
  if (x >= top) return top;
  int e = 0;
  std::frexp(x, &e);  // 2^(e-1) <= x < 2^e
  return std::ldexp(1.0, e - 1);
}

std::optional<double> dyadic_ceil(const DyadicSet& d, double x) {
  const double top = std::ldexp(1.0, -d.first_exponent);
  if (x > top) return std::nullopt;
  if (x <= 0.0) return 0.0;
  int e = 0;
  const double f = std::frexp(x, &e);
  return f == 0.5 ? x : std::ldexp(1.0, e);
}

int dyadic_exponent(double x) {
  int e = 0;
  std::frexp(x, &e);
  return 1 - e;
}

// ---- Cantor ternary set (double path) -------------------------------------

struct CantorBracket {
  double floor;
  double ceil;
};

// Walks ternary digits of x in [0,1). The first digit 1 marks the removed
// middle third containing x; its ends are the neighbours in the closure.
CantorBracket cantor_bracket(double x) {
  if (x <= 0.0) return {0.0, 0.0};
  if (x >= 1.0) return {1.0, 1.0};
  double prefix = 0.0;
  double scale = 1.0;
  double frac = x;
  for (int k = 1; k <= 45; ++k) {
    scale /= 3.0;
    const double x3 = frac * 3.0;
    const double digit = std::floor(x3);
    frac = x3 - digit;
    if (digit == 1.0) {
      if (frac == 0.0) return {x, x};
      return {prefix + scale, prefix + 2.0 * scale};
    }
    prefix += digit * scale;
    if (frac == 0.0) return {x, x};
  }
  return {x, x};
}

std::optional<double> cantor_floor(double x) {
  if (x < 0.0) return std::nullopt;
  return cantor_bracket(x).floor;
}

std::optional<double> cantor_ceil(double x) {
  if (x > 1.0) return std::nullopt;
  return cantor_bracket(x).ceil;
}

bool cantor_holds(double x) {
  if (x < 0.0 || x > 1.0) return false;
  const auto b = cantor_bracket(x);
  return std::abs(b.floor - x) <= 1e-12 || std::abs(b.ceil - x) <= 1e-12;
}

std::optional<Point> cantor_member_in_open(double u, double v) {
  const double m = u + (v - u) / 2.0;
  if (auto f = cantor_floor(std::min(m, 1.0)); f && *f > u && *f < v) return at(*f);
  if (auto c = cantor_ceil(std::max(m, 0.0)); c && *c > u && *c < v) return at(*c);
  return std::nullopt;
}

std::optional<double> cantor_descend(double a, double len, double u, double v, int depth,
                                     std::mt19937_64& rng) {
  if (a + len <= u || a >= v) return std::nullopt;
  if (depth >= 34) {
    const double x = a;
    if (x > u && x < v) return x;
    if (a + len > u && a + len < v) return a + len;
    return std::nullopt;
  }
  const double third = len / 3.0;
  std::bernoulli_distribution coin(0.5);
  const bool right_first = coin(rng);
  for (int i = 0; i < 2; ++i) {
    const bool right = (i == 0) == right_first;
    const double start = right ? a + 2.0 * third : a;
    if (auto r = cantor_descend(start, third, u, v, depth + 1, rng)) return r;
  }
  return std::nullopt;
}

FiniteSet cantor_probes(double spacing) {
  int level = 0;
  double len = 1.0;
  while (len >= spacing / 2.0) {
    len /= 3.0;
    ++level;
  }
  FiniteSet out;
  const std::uint64_t count = std::uint64_t{1} << level;
  out.reserve(count * 2);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double x = 0.0;
    double scale = 1.0;
    for (int k = level - 1; k >= 0; --k) {
      scale /= 3.0;
      if ((mask >> k) & 1U) x += 2.0 * scale;
    }
    out.push_back(at(x));
    out.push_back(at(x + len));
  }
  return canonical(std::move(out));
}

// ---- function-induced -----------------------------------------------------

using AnchorList = std::vector<std::pair<double, std::int64_t>>;

double fi_slack(const FunctionInduced& f) {
  if (f.limits.empty() || !f.tail_bound) return 0.0;
  return f.tail_bound(f.resolved);
}

std::optional<double> fi_floor(const FunctionInduced& f, double x) {
  std::optional<double> best;
  const auto& an = *f.anchors;
  auto it = std::upper_bound(an.begin(), an.end(), std::make_pair(x, std::numeric_limits<std::int64_t>::max()));
  if (it != an.begin()) best = std::prev(it)->first;
  for (double l : f.limits)
    if (l <= x && (!best || l > *best)) best = l;
  return best;
}

std::optional<double> fi_ceil(const FunctionInduced& f, double x) {
  std::optional<double> best;
  const auto& an = *f.anchors;
  auto it = std::lower_bound(an.begin(), an.end(), std::make_pair(x, std::numeric_limits<std::int64_t>::min()));
  if (it != an.end()) best = it->first;
  for (double l : f.limits)
    if (l >= x && (!best || l < *best)) best = l;
  return best;
}

Meet fi_meets(const FunctionInduced& f, double p, double q) {
  if (p > q) return Meet::no;
  const auto& an = *f.anchors;
  auto it = std::lower_bound(an.begin(), an.end(), std::make_pair(p, std::numeric_limits<std::int64_t>::min()));
  if (it != an.end() && it->first <= q) return Meet::yes;
  const double tau = fi_slack(f);
  Meet out = Meet::no;
  for (double l : f.limits) {
    if (l > p && l < q) return Meet::yes;
    if (l + tau >= p && l - tau <= q) out = Meet::unknown;
  }
  return out;
}

std::optional<Point> fi_member_in_open(const FunctionInduced& f, double u, double v) {
  const auto& an = *f.anchors;
  std::optional<Point> best;
  auto it = std::upper_bound(an.begin(), an.end(), std::make_pair(u, std::numeric_limits<std::int64_t>::max()));
  for (; it != an.end() && it->first < v; ++it)
    if (!best || it->second < best->label) best = indexed(it->first, it->second);
  if (best) return best;
  // A declared accumulation value inside (u, v) guarantees a tail member there.
  const bool limit_inside =
      std::any_of(f.limits.begin(), f.limits.end(), [&](double l) { return l > u && l < v; });
  if (!limit_inside) return std::nullopt;
  const std::int64_t stop = f.first + 64 * f.resolved;
  for (std::int64_t i = f.first + f.resolved; i < stop; ++i) {
    const double y = f.a(i);
    if (y > u && y < v) return indexed(y, i);
  }
  throw UnresolvedError("function-induced space: no member located near an accumulation value");
}

SpaceDescriptor::Kind build_anchors(FunctionInduced f) {
  auto list = std::make_shared<AnchorList>();
  list->reserve(static_cast<std::size_t>(f.resolved));
  for (std::int64_t i = f.first; i < f.first + f.resolved; ++i) {
    const double y = f.a(i);
    if (!std::isfinite(y)) throw std::domain_error("function-induced space: a(i) is not finite");
    list->emplace_back(y, i);
  }
  std::sort(list->begin(), list->end());
  f.anchors = std::move(list);
  return f;
}


}  // namespace

bool interval_holds(const Interval& iv, double x) {
  if (x < iv.lo || x > iv.hi) return false;
  if (x == iv.lo && !iv.closed_lo) return false;
  if (x == iv.hi && !iv.closed_hi) return false;
  return true;
}

// ---- factories --------------------------------------------------------------

SpaceDescriptor SpaceDescriptor::interval(double lo, double hi, bool closed_lo, bool closed_hi) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::domain_error("interval: need finite lo <= hi");
  if (lo == hi && !(closed_lo && closed_hi)) throw std::domain_error("interval: empty");
  return SpaceDescriptor(Interval{lo, hi, closed_lo, closed_hi, Density::all});
}

SpaceDescriptor SpaceDescriptor::rationals(double lo, double hi) {
  auto s = interval(lo, hi);
  std::get<Interval>(s.kind_).density = Density::rationals;
  return s;
}

SpaceDescriptor SpaceDescriptor::irrationals(double lo, double hi) {
  auto s = interval(lo, hi);
  std::get<Interval>(s.kind_).density = Density::irrationals;
  return s;
}

SpaceDescriptor SpaceDescriptor::harmonic(std::vector<double> extra) {
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  return SpaceDescriptor(HarmonicSet{std::move(extra)});
}

SpaceDescriptor SpaceDescriptor::dyadic(int first_exponent) {
  if (first_exponent < 0 || first_exponent > 60) throw std::domain_error("dyadic: first exponent out of range");
  return SpaceDescriptor(DyadicSet{first_exponent});
}

SpaceDescriptor SpaceDescriptor::function_induced(std::function<double(std::int64_t)> a,
                                                  std::vector<double> limits,
                                                  std::function<double(std::int64_t)> tail_bound,
                                                  std::int64_t first, std::int64_t resolved) {
  if (!a) throw std::invalid_argument("function-induced space: missing a");
  if (resolved < 1) throw std::domain_error("function-induced space: resolved must be positive");
  return SpaceDescriptor(build_anchors(
      FunctionInduced{std::move(a), first, std::move(limits), std::move(tail_bound), resolved, nullptr}));
}

SpaceDescriptor SpaceDescriptor::cantor() { return SpaceDescriptor(CantorTernary{}); }

SpaceDescriptor SpaceDescriptor::union_of(std::vector<Interval> pieces) {
  if (pieces.empty()) throw std::domain_error("union: no pieces");
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < pieces.size(); ++i)
    if (pieces[i].lo < pieces[i - 1].hi) throw std::domain_error("union: overlapping pieces");
  for (const auto& p : pieces)
    if (!(p.lo <= p.hi)) throw std::domain_error("union: bad piece");
  return SpaceDescriptor(UnionOfIntervals{std::move(pieces)});
}

SpaceDescriptor SpaceDescriptor::half_line() { return SpaceDescriptor(HalfLine{}); }

SpaceDescriptor SpaceDescriptor::product(SpaceDescriptor first, SpaceDescriptor second) {
  if (!first.is_line() || !second.is_line()) throw std::domain_error("product: factors must be line spaces");
  return SpaceDescriptor(Product{std::make_shared<const SpaceDescriptor>(std::move(first)),
                                 std::make_shared<const SpaceDescriptor>(std::move(second))});
}

// ---- queries ----------------------------------------------------------------

std::string SpaceDescriptor::name() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Interval& iv) {
                   os << (iv.closed_lo ? '[' : '(') << iv.lo << ',' << iv.hi << (iv.closed_hi ? ']' : ')');
                   if (iv.density == Density::rationals) os << "&Q";
                   if (iv.density == Density::irrationals) os << "-Q";
                 },
                 [&](const HarmonicSet&) { os << "harmonic"; },
                 [&](const DyadicSet& d) { os << "dyadic(" << d.first_exponent << ')'; },
                 [&](const FunctionInduced&) { os << "function-induced"; },
                 [&](const CantorTernary&) { os << "cantor"; },
                 [&](const UnionOfIntervals& u) { os << "union(" << u.pieces.size() << ')'; },
                 [&](const HalfLine&) { os << "(0,inf)"; },
                 [&](const Product& p) { os << p.first->name() << 'x' << p.second->name(); },
             },
             kind_);
  return os.str();
}

bool SpaceDescriptor::is_line() const { return !is_product(); }

bool SpaceDescriptor::exact_gap() const {
  return !is_product() && !std::holds_alternative<FunctionInduced>(kind_);
}

double SpaceDescriptor::distance(const Point& p, const Point& q) const {
  if (is_product()) return std::abs(p.x - q.x) + std::abs(p.y - q.y);
  return std::abs(p.x - q.x);
}

bool SpaceDescriptor::contains(const Point& p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  return std::visit(
      overloaded{
          [&](const Interval& iv) {
            if (!interval_holds(iv, p.x)) return false;
            if (iv.density == Density::rationals) return !p.irrational;
            if (iv.density == Density::irrationals) return p.irrational;
            return true;
          },
          [&](const HarmonicSet& h) {
            if (p.label >= 1 && std::abs(1.0 / static_cast<double>(p.label) - p.x) <= 1e-15) return true;
            return std::find(h.extra.begin(), h.extra.end(), p.x) != h.extra.end();
          },
          [&](const DyadicSet& d) {
            return p.label >= d.first_exponent && p.label <= 1070 &&
                   std::ldexp(1.0, -static_cast<int>(p.label)) == p.x;
          },
          [&](const FunctionInduced& f) {
            return p.label >= f.first && std::abs(f.a(p.label) - p.x) <= 1e-12 * std::max(1.0, std::abs(p.x));
          },
          [&](const CantorTernary&) { return cantor_holds(p.x); },
          [&](const UnionOfIntervals& u) {
            return std::any_of(u.pieces.begin(), u.pieces.end(), [&](const Interval& iv) {
              if (!interval_holds(iv, p.x)) return false;
              if (iv.density == Density::rationals) return !p.irrational;
              if (iv.density == Density::irrationals) return p.irrational;
              return true;
            });
          },
          [&](const HalfLine&) { return p.x > 0.0; },
          [&](const Product& pr) {
            Point a = p;
            a.y = 0.0;
            Point b = p;
            b.x = p.y;
            b.y = 0.0;
            return pr.first->contains(a) && pr.second->contains(b);
          },
      },
      kind_);
}

double SpaceDescriptor::infimum() const {
  return std::visit(overloaded{
                        [](const Interval& iv) { return iv.lo; },
                        [](const HarmonicSet& h) { return h.extra.empty() ? 0.0 : std::min(0.0, h.extra.front()); },
                        [](const DyadicSet&) { return 0.0; },
                        [](const FunctionInduced& f) {
                          double lo = f.anchors->front().first;
                          for (double l : f.limits) lo = std::min(lo, l);
                          return lo;
                        },
                        [](const CantorTernary&) { return 0.0; },
                        [](const UnionOfIntervals& u) { return u.pieces.front().lo; },
                        [](const HalfLine&) { return 0.0; },
                        [](const Product&) -> double { throw std::domain_error("infimum: product space"); },
                    },
                    kind_);
}

double SpaceDescriptor::supremum() const {
  return std::visit(overloaded{
                        [](const Interval& iv) { return iv.hi; },
                        [](const HarmonicSet& h) { return h.extra.empty() ? 1.0 : std::max(1.0, h.extra.back()); },
                        [](const DyadicSet& d) { return std::ldexp(1.0, -d.first_exponent); },
                        [](const FunctionInduced& f) {
                          double hi = f.anchors->back().first;
                          for (double l : f.limits) hi = std::max(hi, l);
                          return hi;
                        },
                        [](const CantorTernary&) { return 1.0; },
                        [](const UnionOfIntervals& u) { return u.pieces.back().hi; },
                        [](const HalfLine&) { return kInf; },
                        [](const Product&) -> double { throw std::domain_error("supremum: product space"); },
                    },
                    kind_);
}

double SpaceDescriptor::diameter() const {
  if (const auto* p = std::get_if<Product>(&kind_)) return p->first->diameter() + p->second->diameter();
  return supremum() - infimum();
}

std::optional<double> SpaceDescriptor::closure_floor(double x) const {
  return std::visit(overloaded{
                        [&](const Interval& iv) { return iv_floor(iv, x); },
                        [&](const HarmonicSet& h) { return harmonic_floor(h, x); },
                        [&](const DyadicSet& d) { return dyadic_floor(d, x); },
                        [&](const FunctionInduced& f) { return fi_floor(f, x); },
                        [&](const CantorTernary&) { return cantor_floor(x); },
                        [&](const UnionOfIntervals& u) {
                          std::optional<double> best;
                          for (const auto& iv : u.pieces)
                            if (auto f = iv_floor(iv, x); f && (!best || *f > *best)) best = f;
                          return best;
                        },
                        [&](const HalfLine&) { return x >= 0.0 ? std::optional<double>(x) : std::nullopt; },
                        [&](const Product&) -> std::optional<double> {
                          throw std::domain_error("closure_floor: product space");
                        },
                    },
                    kind_);
}

std::optional<double> SpaceDescriptor::closure_ceil(double x) const {
  return std::visit(overloaded{
                        [&](const Interval& iv) { return iv_ceil(iv, x); },
                        [&](const HarmonicSet& h) { return harmonic_ceil(h, x); },
                        [&](const DyadicSet& d) { return dyadic_ceil(d, x); },
                        [&](const FunctionInduced& f) { return fi_ceil(f, x); },
                        [&](const CantorTernary&) { return cantor_ceil(x); },
                        [&](const UnionOfIntervals& u) {
                          std::optional<double> best;
                          for (const auto& iv : u.pieces)
                            if (auto c = iv_ceil(iv, x); c && (!best || *c < *best)) best = c;
                          return best;
                        },
                        [&](const HalfLine&) { return std::optional<double>(std::max(x, 0.0)); },
                        [&](const Product&) -> std::optional<double> {
                          throw std::domain_error("closure_ceil: product space");
                        },
                    },
                    kind_);
}

double SpaceDescriptor::closure_slack() const {
  if (const auto* f = std::get_if<FunctionInduced>(&kind_)) return fi_slack(*f);
  return 0.0;
}

Meet SpaceDescriptor::meets(double p, double q) const {
  if (p > q) return Meet::no;
  return std::visit(
      overloaded{
          [&](const Interval& iv) { return iv_meets(iv, p, q); },
          [&](const HarmonicSet& h) {
            for (double e : h.extra)
              if (e >= p && e <= q) return Meet::yes;
            if (q <= 0.0 || p > 1.0) return Meet::no;
            if (p <= 0.0) return Meet::yes;
            return 1.0 / harmonic_index_above(p) <= q ? Meet::yes : Meet::no;
          },
          [&](const DyadicSet& d) {
            if (q <= 0.0) return Meet::no;
            auto c = dyadic_ceil(d, std::max(p, 0.0));
            if (!c) return Meet::no;
            if (*c == 0.0) return Meet::yes;  // p <= 0 < q: small powers fit
            return *c <= q ? Meet::yes : Meet::no;
          },
          [&](const FunctionInduced& f) { return fi_meets(f, p, q); },
          [&](const CantorTernary&) {
            auto c = cantor_ceil(std::max(p, 0.0));
            return c && *c <= q ? Meet::yes : Meet::no;
          },
          [&](const UnionOfIntervals& u) {
            for (const auto& iv : u.pieces)
              if (iv_meets(iv, p, q) == Meet::yes) return Meet::yes;
            return Meet::no;
          },
          [&](const HalfLine&) { return q > 0.0 ? Meet::yes : Meet::no; },
          [&](const Product&) -> Meet { throw std::domain_error("meets: product space"); },
      },
      kind_);
}

std::optional<Point> SpaceDescriptor::member_in_open(double u, double v) const {
  if (!(u < v)) return std::nullopt;
  return std::visit(
      overloaded{
          [&](const Interval& iv) { return iv_member_in_open(iv, u, v); },
          [&](const HarmonicSet& h) { return harmonic_member_in_open(h, u, v); },
          [&](const DyadicSet& d) -> std::optional<Point> {
            if (v <= 0.0) return std::nullopt;
            int m = d.first_exponent;
            const double top = std::ldexp(1.0, -m);
            if (v <= top) {
              m = dyadic_exponent(v);
              if (std::ldexp(1.0, -m) >= v) ++m;
            }
            const Point p = dyadic_point(m);
            return p.x > u ? std::optional<Point>(p) : std::nullopt;
          },
          [&](const FunctionInduced& f) { return fi_member_in_open(f, u, v); },
          [&](const CantorTernary&) { return cantor_member_in_open(u, v); },
          [&](const UnionOfIntervals& un) -> std::optional<Point> {
            for (const auto& iv : un.pieces)
              if (auto p = iv_member_in_open(iv, u, v)) return p;
            return std::nullopt;
          },
          [&](const HalfLine&) -> std::optional<Point> {
            const double lo = std::max(u, 0.0);
            if (!(lo < v)) return std::nullopt;
            return at(std::isfinite(v) ? lo + (v - lo) / 2.0 : lo + 1.0);
          },
          [&](const Product&) -> std::optional<Point> { throw std::domain_error("member_in_open: product space"); },
      },
      kind_);
}

std::optional<Point> SpaceDescriptor::member_at(double x) const {
  return std::visit(
      overloaded{
          [&](const Interval& iv) -> std::optional<Point> {
            if (!interval_holds(iv, x)) return std::nullopt;
            return tagged_for(iv.density, x);
          },
          [&](const HarmonicSet& h) -> std::optional<Point> {
            if (std::find(h.extra.begin(), h.extra.end(), x) != h.extra.end()) return at(x);
            if (x <= 0.0 || x > 1.0) return std::nullopt;
            const double n = std::round(1.0 / x);
            if (n >= 1.0 && std::abs(1.0 / n - x) <= 1e-15) return harmonic_point(n);
            return std::nullopt;
          },
          [&](const DyadicSet& d) -> std::optional<Point> {
            if (x <= 0.0) return std::nullopt;
            int e = 0;
            if (std::frexp(x, &e) != 0.5) return std::nullopt;
            const int m = 1 - e;
            if (m < d.first_exponent) return std::nullopt;
            return dyadic_point(m);
          },
          [&](const FunctionInduced& f) -> std::optional<Point> {
            const auto& an = *f.anchors;
            auto it = std::lower_bound(an.begin(), an.end(),
                                       std::make_pair(x, std::numeric_limits<std::int64_t>::min()));
            if (it != an.end() && it->first == x) return indexed(x, it->second);
            return std::nullopt;
          },
          [&](const CantorTernary&) -> std::optional<Point> {
            if (!cantor_holds(x)) return std::nullopt;
            return at(x);
          },
          [&](const UnionOfIntervals& u) -> std::optional<Point> {
            for (const auto& iv : u.pieces)
              if (interval_holds(iv, x)) return tagged_for(iv.density, x);
            return std::nullopt;
          },
          [&](const HalfLine&) -> std::optional<Point> {
            if (x > 0.0) return at(x);
            return std::nullopt;
          },
          [&](const Product&) -> std::optional<Point> { throw std::domain_error("member_at: product space"); },
      },
      kind_);
}

std::optional<Point> SpaceDescriptor::random_member_in(double u, double v, std::mt19937_64& rng) const {
  if (!(u < v)) return std::nullopt;
  return std::visit(
      overloaded{
          [&](const Interval& iv) { return iv_random_in(iv, u, v, rng); },
          [&](const HarmonicSet& h) -> std::optional<Point> {
            std::vector<double> extras;
            for (double e : h.extra)
              if (e > u && e < v) extras.push_back(e);
            std::optional<Point> seq;
            if (v > 0.0 && u < 1.0) {
              const double n_lo = v > 1.0 ? 1.0 : harmonic_index_above(std::nextafter(v, 0.0));
              double n_hi = u > 0.0 ? harmonic_index_below(std::nextafter(u, 2.0)) : n_lo * 1000.0 + 1e6;
              if (1.0 / n_lo >= v) {
                // nothing
              } else if (n_lo <= n_hi) {
                std::uniform_real_distribution<double> logu(std::log(n_lo), std::log(n_hi + 1.0));
                double n = std::floor(std::exp(logu(rng)));
                n = std::clamp(n, n_lo, n_hi);
                if (1.0 / n > u && 1.0 / n < v) seq = harmonic_point(n);
              }
            }
            if (!extras.empty() && (!seq || std::bernoulli_distribution(0.5)(rng))) {
              std::uniform_int_distribution<std::size_t> pick(0, extras.size() - 1);
              return at(extras[pick(rng)]);
            }
            return seq;
          },
          [&](const DyadicSet& d) -> std::optional<Point> {
            if (v <= 0.0) return std::nullopt;
            int m_lo = d.first_exponent;
            if (v <= std::ldexp(1.0, -m_lo)) {
              m_lo = dyadic_exponent(v);
              if (std::ldexp(1.0, -m_lo) >= v) ++m_lo;
            }
            int m_hi = u > 0.0 ? dyadic_exponent(u) : m_lo + 52;
            if (u > 0.0 && std::ldexp(1.0, -m_hi) <= u) --m_hi;
            if (m_hi < m_lo) return std::nullopt;
            std::uniform_int_distribution<int> pick(m_lo, m_hi);
            return dyadic_point(pick(rng));
          },
          [&](const FunctionInduced& f) -> std::optional<Point> {
            const auto& an = *f.anchors;
            auto lo = std::upper_bound(an.begin(), an.end(), std::make_pair(u, std::numeric_limits<std::int64_t>::max()));
            auto hi = std::lower_bound(an.begin(), an.end(), std::make_pair(v, std::numeric_limits<std::int64_t>::min()));
            if (lo >= hi) return fi_member_in_open(f, u, v);
            std::uniform_int_distribution<std::ptrdiff_t> pick(0, std::distance(lo, hi) - 1);
            const auto& e = *(lo + pick(rng));
            return indexed(e.first, e.second);
          },
          [&](const CantorTernary&) -> std::optional<Point> {
            auto x = cantor_descend(0.0, 1.0, u, v, 0, rng);
            if (!x) return std::nullopt;
            return at(*x);
          },
          [&](const UnionOfIntervals& un) -> std::optional<Point> {
            std::vector<const Interval*> hits;
            for (const auto& iv : un.pieces)
              if (iv_meets(iv, u, v) == Meet::yes) hits.push_back(&iv);
            std::shuffle(hits.begin(), hits.end(), rng);
            for (const auto* iv : hits)
              if (auto p = iv_random_in(*iv, u, v, rng)) return p;
            return std::nullopt;
          },
          [&](const HalfLine&) -> std::optional<Point> {
            const double lo = std::max(u, 0.0);
            const double hi = std::isfinite(v) ? v : lo + 100.0;
            if (!(lo < hi)) return std::nullopt;
            std::uniform_real_distribution<double> dist(lo, hi);
            double x = dist(rng);
            if (x <= 0.0) x = hi / 2.0;
            return at(x);
          },
          [&](const Product&) -> std::optional<Point> { throw std::domain_error("random_member_in: product space"); },
      },
      kind_);
}

std::optional<Point> SpaceDescriptor::random_member(std::mt19937_64& rng) const {
  if (const auto* p = std::get_if<Product>(&kind_)) {
    auto a = p->first->random_member(rng);
    auto b = p->second->random_member(rng);
    if (!a || !b) return std::nullopt;
    Point out = planar(a->x, b->x);
    out.irrational = a->irrational;
    return out;
  }
  if (is_half_line()) return random_member_in(0.0, 100.0, rng);
  const double lo = infimum();
  const double hi = supremum();
  const double pad = std::max(1.0, hi - lo);
  return random_member_in(lo - pad, hi + pad, rng);
}

FiniteSet SpaceDescriptor::probes(double spacing) const {
  if (!(spacing > 0.0)) throw std::domain_error("probes: spacing must be positive");
  return std::visit(
      overloaded{
          [&](const Interval& iv) { return iv_probes(iv, spacing); },
          [&](const HarmonicSet& h) {
            FiniteSet out;
            for (double n = 1.0;; n += 1.0) {
              out.push_back(harmonic_point(n));
              if (1.0 / n < spacing / 2.0) break;
            }
            for (double e : h.extra) out.push_back(at(e));
            return canonical(std::move(out));
          },
          [&](const DyadicSet& d) {
            FiniteSet out;
            for (int m = d.first_exponent; m < 1070; ++m) {
              out.push_back(dyadic_point(m));
              if (std::ldexp(1.0, -m) < spacing / 2.0) break;
            }
            return canonical(std::move(out));
          },
          [&](const FunctionInduced& f) {
            FiniteSet out;
            out.reserve(f.anchors->size());
            for (const auto& [y, i] : *f.anchors) out.push_back(indexed(y, i));
            return canonical(std::move(out));
          },
          [&](const CantorTernary&) { return cantor_probes(spacing); },
          [&](const UnionOfIntervals& u) {
            FiniteSet out;
            for (const auto& iv : u.pieces) {
              auto part = iv_probes(iv, spacing);
              out.insert(out.end(), part.begin(), part.end());
            }
            return canonical(std::move(out));
          },
          [&](const HalfLine&) -> FiniteSet { throw std::domain_error("probes: half-line is not totally bounded"); },
          [&](const Product& p) {
            const auto a = p.first->probes(spacing / 2.0);
            const auto b = p.second->probes(spacing / 2.0);
            FiniteSet out;
            out.reserve(a.size() * b.size());
            for (const auto& pa : a)
              for (const auto& pb : b) {
                Point q = planar(pa.x, pb.x);
                q.irrational = pa.irrational;
                out.push_back(q);
              }
            return canonical(std::move(out));
          },
      },
      kind_);
}

bool SpaceDescriptor::scan_descending() const {
  return std::holds_alternative<HarmonicSet>(kind_) || std::holds_alternative<DyadicSet>(kind_);
}

const SpaceDescriptor& SpaceDescriptor::first_factor() const {
  if (const auto* p = std::get_if<Product>(&kind_)) return *p->first;
  throw std::domain_error("first_factor: not a product space");
}

const SpaceDescriptor& SpaceDescriptor::second_factor() const {
  if (const auto* p = std::get_if<Product>(&kind_)) return *p->second;
  throw std::domain_error("second_factor: not a product space");
}

}  // namespace hext
