#include "hext/set_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace hext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sorted_values(const FiniteSet& k) {
  auto xs = coordinates(k);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

double plain_mean(std::span<const double> v) {
  if (v.empty()) throw std::domain_error("mean of an empty set");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::int64_t harmonic_index(const Point& p) {
  if (p.label > 0) return p.label;
  if (!(p.x > 0.0)) return 0;
  const double n = std::round(1.0 / p.x);
  if (n >= 1.0 && std::abs(1.0 / n - p.x) <= 1e-12 * p.x) return static_cast<std::int64_t>(n);
  return 0;
}

int dyadic_index(const Point& p) {
  int e = 0;
  const double m = std::frexp(p.x, &e);
  if (!(p.x > 0.0) || m != 0.5) throw std::domain_error("point is not of the form 2^-n");
  const int n = 1 - e;
  if (p.label > 0 && p.label != n) throw std::domain_error("dyadic label disagrees with its coordinate");
  return n;
}

// Partition H ∪ {lo, hi}; throws when H leaves [lo, hi].
std::vector<double> augmented(const FiniteSet& h, double lo, double hi) {
  std::vector<double> a;
  a.reserve(h.size() + 2);
  a.push_back(lo);
  for (const auto& p : h) {
    if (p.x < lo || p.x > hi) throw std::domain_error("point outside the interval");
    a.push_back(p.x);
  }
  a.push_back(hi);
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

std::vector<Interval> full_pieces(const SpaceDescriptor& h) {
  std::vector<Interval> pieces;
  if (const auto* iv = std::get_if<Interval>(&h.kind())) {
    pieces.push_back(*iv);
  } else if (const auto* un = std::get_if<UnionOfIntervals>(&h.kind())) {
    pieces = un->pieces;
  } else {
    throw std::invalid_argument("inner Jordan functional needs an interval or a union of intervals");
  }
  std::erase_if(pieces, [](const Interval& p) { return p.density != Density::all; });
  return pieces;
}

// Whether the open interval (u, v) lies inside the union of the given pieces.
bool open_span_covered(const std::vector<Interval>& pieces, double u, double v) {
  if (!(u < v)) return true;
  std::vector<double> cuts{u, v};
  for (const auto& p : pieces)
    for (double e : {p.lo, p.hi})
      if (e > u && e < v) cuts.push_back(e);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto covered = [&](double x) {
    return std::any_of(pieces.begin(), pieces.end(), [x](const Interval& p) { return interval_holds(p, x); });
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (i > 0 && !covered(cuts[i])) return false;
    if (!covered(cuts[i] + (cuts[i + 1] - cuts[i]) / 2.0)) return false;
  }
  return true;
}

double distance_to(const std::vector<double>& targets, double x) {
  double best = kInf;
  for (double t : targets) best = std::min(best, std::abs(x - t));
  return best;
}

std::vector<double> accumulation_set(const IsoSetSpec& spec) {
  std::vector<double> out;
  for (const auto& p : spec.pieces) out.push_back(p.limit);
  return out;
}

constexpr std::int64_t kIsoBudget = 50'000'000;

// Isolated points at distance >= delta from the accumulation set, with that distance.
std::vector<std::pair<double, double>> isolated_points(const IsoSetSpec& spec, double delta) {
  const auto acc = accumulation_set(spec);
  std::set<double> seen;
  std::vector<std::pair<double, double>> out;
  auto consider = [&](double x) {
    const double d = distance_to(acc, x);
    if (d >= delta && seen.insert(x).second) out.emplace_back(x, d);
  };
  for (double x : spec.finite) consider(x);
  std::int64_t budget = kIsoBudget;
  for (const auto& piece : spec.pieces) {
    if (!piece.term) throw std::invalid_argument("iso spec: piece without terms");
    for (std::int64_t n = 1;; ++n) {
      if (--budget < 0) throw UnresolvedError("iso spec: too many isolated points for this delta");
      const double x = piece.term(n);
      if (std::abs(x - piece.limit) < delta) break;
      consider(x);
    }
  }
  return out;
}

}  // namespace

SetFunction sf_constant(double c) {
  return {[c](const FiniteSet&) { return c; }, DomainClass::all, "constant"};
}

SetFunction sf_midpoint() {
  return {[](const FiniteSet& k) {
            if (k.empty()) throw std::domain_error("midpoint of an empty set");
            const auto [mn, mx] = std::minmax_element(k.begin(), k.end(), [](const Point& a, const Point& b) {
              return a.x < b.x;
            });
            return mn->x + (mx->x - mn->x) / 2.0;
          },
          DomainClass::all, "midpoint"};
}

SetFunction sf_diameter(const SpaceDescriptor& space) {
  const bool planar_space = space.is_product();
  return {[planar_space](const FiniteSet& k) {
            if (k.empty()) return 0.0;
            auto range = [&](auto proj) {
              double lo = proj(k.front());
              double hi = lo;
              for (const auto& p : k) {
                lo = std::min(lo, proj(p));
                hi = std::max(hi, proj(p));
              }
              return hi - lo;
            };
            if (!planar_space) return range([](const Point& p) { return p.x; });
            // L1 diameter through the rotated coordinates x + y and x - y.
            return std::max(range([](const Point& p) { return p.x + p.y; }),
                            range([](const Point& p) { return p.x - p.y; }));
          },
          DomainClass::all, "diameter"};
}

SetFunction sf_finite_sum() {
  return {[](const FiniteSet& k) {
            double s = 0.0;
            for (const auto& p : k) s += p.x;
            return s;
          },
          DomainClass::all, "finite-sum"};
}

SetFunction sf_finite_mean() {
  return {[](const FiniteSet& k) {
            auto xs = coordinates(k);
            return plain_mean(xs);
          },
          DomainClass::all, "finite-mean"};
}

SetFunction sf_indicator_subset(SpaceDescriptor sub) {
  auto name = "indicator(" + sub.name() + ")";
  return {[sub = std::move(sub)](const FiniteSet& k) {
            return std::all_of(k.begin(), k.end(), [&](const Point& p) { return sub.contains(p); }) ? 1.0 : 0.0;
          },
          DomainClass::all, name};
}

SetFunction sf_two_dense_indicator() {
  return {[](const FiniteSet& k) {
            return std::any_of(k.begin(), k.end(), [](const Point& p) { return p.irrational; }) ? 1.0 : 0.0;
          },
          DomainClass::all, "two-dense-indicator"};
}

SetFunction sf_parity_dyadic() {
  return {[](const FiniteSet& k) {
            double sum = 0.0;
            for (const auto& p : k) {
              dyadic_index(p);
              sum += p.x;
            }
            if (k.size() % 2 == 0) return sum;
            double mn = kInf;
            for (const auto& p : k) mn = std::min(mn, p.x);
            return sum - mn - 1.0 / static_cast<double>(k.size());
          },
          DomainClass::all, "parity-dyadic"};
}

SetFunction sf_linear(double c1, const SetFunction& s1, double c2, const SetFunction& s2) {
  return {[=](const FiniteSet& k) { return ext_add(ext_mul(c1, s1(k)), ext_mul(c2, s2(k))); }, DomainClass::all,
          "linear(" + s1.name + "," + s2.name + ")"};
}

SetFunction sf_ignoring(const SetFunction& s, std::function<bool(const Point&)> drop, std::string name) {
  return {[s, drop = std::move(drop)](const FiniteSet& k) {
            FiniteSet kept;
            std::copy_if(k.begin(), k.end(), std::back_inserter(kept), [&](const Point& p) { return !drop(p); });
            return s(kept);
          },
          s.domain, std::move(name)};
}

SetFunction sf_pullback(const SetFunction& s, RealFn f, std::string name) {
  return {[s, f = std::move(f)](const FiniteSet& k) {
            FiniteSet image;
            image.reserve(k.size());
            for (const auto& p : k) {
              Point q = p;
              q.x = f(p.x);
              q.label = 0;
              image.push_back(q);
            }
            return s(canonical(std::move(image)));
          },
          DomainClass::all, std::move(name)};
}

SetFunction sf_split(std::function<double(double, double)> combine, const SetFunction& s1,
                     std::function<bool(double)> in_first, const SetFunction& s2, std::function<bool(double)> in_second,
                     std::string name) {
  return {[=](const FiniteSet& k) {
            FiniteSet a;
            FiniteSet b;
            for (const auto& p : k) {
              if (in_first(p.x))
                a.push_back(p);
              else if (in_second(p.x))
                b.push_back(p);
              else
                throw std::domain_error("point in neither piece");
            }
            return combine(s1(a), s2(b));
          },
          DomainClass::all, std::move(name)};
}

SetFunction sf_product_midpoint_sum() {
  return {[](const FiniteSet& k) {
            if (k.empty()) throw std::domain_error("midpoint of an empty set");
            double xl = kInf, xh = -kInf, yl = kInf, yh = -kInf;
            for (const auto& p : k) {
              xl = std::min(xl, p.x);
              xh = std::max(xh, p.x);
              yl = std::min(yl, p.y);
              yh = std::max(yh, p.y);
            }
            return (xl + xh) / 2.0 + (yl + yh) / 2.0;
          },
          DomainClass::all, "product-midpoint-sum"};
}

SetFunction sf_series_harmonic(SeriesSpec spec) {
  if (!spec.a) throw std::invalid_argument("series: missing coefficients");
  return {[a = spec.a](const FiniteSet& h) {
            double s = 0.0;
            for (const auto& p : h)
              if (const auto i = harmonic_index(p); i > 0) s = ext_add(s, a(i));
            return s;
          },
          DomainClass::all, spec.name};
}

SetFunction sf_series_dyadic(SeriesSpec spec) {
  if (!spec.a) throw std::invalid_argument("series: missing coefficients");
  return {[a = spec.a](const FiniteSet& h) {
            double s = 0.0;
            for (const auto& p : h) s = ext_add(s, a(dyadic_index(p)));
            return s;
          },
          DomainClass::stretched, spec.name};
}

InducedProblem sf_unordered_sum(Sequence a, std::vector<double> limits, Sequence tail_bound, std::int64_t first) {
  auto space = SpaceDescriptor::function_induced(a, std::move(limits), std::move(tail_bound), first);
  SetFunction s{[a](const FiniteSet& h) {
                  double sum = 0.0;
                  for (const auto& p : h) sum += a(p.label);
                  return sum;
                },
                DomainClass::all, "unordered-sum"};
  return {std::move(space), std::move(s)};
}

SetFunction sf_riemann(RealFn f, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("riemann: need lo < hi");
  return {[f = std::move(f), lo, hi](const FiniteSet& h) {
            const auto a = augmented(h, lo, hi);
            const std::size_t n = a.size() - 1;
            double s = 0.0;
            for (std::size_t j = 1; 2 * j <= n; ++j) s += f(a[2 * j - 1]) * (a[2 * j] - a[2 * j - 2]);
            if (n % 2 == 1) s += f(hi) * (a[n] - a[n - 1]);
            return s;
          },
          DomainClass::all, "riemann"};
}

SetFunction sf_darboux_upper(RealFn f, double lo, double hi, SupOracle sup) {
  if (!(lo < hi)) throw std::invalid_argument("darboux: need lo < hi");
  if (!sup) sup = probe_sup(std::move(f), 64);
  return {[lo, hi, sup = std::move(sup)](const FiniteSet& h) {
            const auto a = augmented(h, lo, hi);
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < a.size(); ++i) s += sup(a[i], a[i + 1]) * (a[i + 1] - a[i]);
            return s;
          },
          DomainClass::all, "darboux-upper"};
}

SupOracle probe_sup(RealFn f, int samples) {
  if (samples < 1) throw std::invalid_argument("probe_sup: need at least one sample");
  return [f = std::move(f), samples](double u, double v) {
    double best = std::max(f(u), f(v));
    for (int i = 1; i <= samples; ++i) best = std::max(best, f(u + (v - u) * i / (samples + 1)));
    return best;
  };
}

SetFunction sf_polygon_length(Curve gamma) {
  return {[gamma = std::move(gamma)](const FiniteSet& k) {
            const auto t = augmented(k, 0.0, 1.0);
            double len = 0.0;
            auto prev = gamma(t.front());
            for (std::size_t i = 1; i < t.size(); ++i) {
              auto cur = gamma(t[i]);
              if (cur.size() != prev.size()) throw std::domain_error("curve changed dimension");
              double sq = 0.0;
              for (std::size_t d = 0; d < cur.size(); ++d) sq += (cur[d] - prev[d]) * (cur[d] - prev[d]);
              len += std::sqrt(sq);
              prev = std::move(cur);
            }
            return len;
          },
          DomainClass::all, "polygon-length"};
}

SetFunction sf_inner_jordan(const SpaceDescriptor& h) {
  auto pieces = full_pieces(h);
  return {[pieces = std::move(pieces)](const FiniteSet& k) {
            const auto xs = sorted_values(k);
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i)
              if (open_span_covered(pieces, xs[i], xs[i + 1])) s += xs[i + 1] - xs[i];
            return s;
          },
          DomainClass::all, "inner-jordan"};
}

MeanSpec arithmetic_mean() {
  return {[](std::span<const double> v) { return plain_mean(v); }, true, true, true, "arithmetic"};
}

RegularityReport spot_check_regularity(const MeanSpec& mean, std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> len(1, 30);
  RegularityReport r;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = val(rng);
    const double m = mean.mean(v);
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (std::abs(mean.mean(shuffled) - m) > 1e-12) r.permutation_ok = false;
    // Appending many copies of c drives the mean to c.
    const double c = val(rng);
    auto padded = v;
    padded.insert(padded.end(), 100000, c);
    if (std::abs(mean.mean(padded) - c) > 1e-3) r.prefix_ok = false;
    // Values inside [lo, hi] keep the mean there, also after appending a point of it.
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    std::uniform_real_distribution<double> inside(*lo, *hi);
    auto extended = v;
    extended.push_back(inside(rng));
    for (double mm : {m, mean.mean(extended)})
      if (mm < *lo - 1e-12 || mm > *hi + 1e-12) r.interval_ok = false;
  }
  return r;
}

InducedProblem sf_unordered_mean(Sequence a, MeanSpec mean, std::vector<double> limits, Sequence tail_bound,
                                 std::int64_t first) {
  if (!mean.mean) throw std::invalid_argument("unordered mean: missing mean");
  auto space = SpaceDescriptor::function_induced(a, std::move(limits), std::move(tail_bound), first);
  SetFunction s{[a, m = mean.mean](const FiniteSet& h) {
                  std::vector<double> vals;
                  vals.reserve(h.size());
                  for (const auto& p : h) vals.push_back(a(p.label));
                  return m(vals);
                },
                DomainClass::all, "unordered-mean(" + mean.name + ")"};
  return {std::move(space), std::move(s)};
}

AverageVerdict unordered_average_oracle(const Sequence& a, std::int64_t first, std::int64_t cutoff, double tol) {
  if (cutoff < 8) throw std::invalid_argument("unordered_average_oracle: cutoff too small");
  auto block_range = [&](std::int64_t from, std::int64_t to) {
    double lo = kInf, hi = -kInf;
    for (std::int64_t i = from; i < to; ++i) {
      const double v = a(i);
      if (!std::isfinite(v)) return std::pair{-kInf, kInf};
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return std::pair{lo, hi};
  };
  const auto [l1, h1] = block_range(first + cutoff / 2, first + 3 * cutoff / 4);
  const auto [l2, h2] = block_range(first + 3 * cutoff / 4, first + cutoff);
  const double r1 = h1 - l1;
  const double r2 = h2 - l2;
  AverageVerdict v;
  if (r2 <= tol) {
    v.kind = AverageVerdict::Kind::exists;
    v.value = l2 + r2 / 2.0;
    v.reason = r2 == 0.0 ? "tail is constant" : "tail values cluster at a single point";
  } else if (r2 >= 0.5 * r1) {
    v.kind = AverageVerdict::Kind::not_exists;
    v.value = std::numeric_limits<double>::quiet_NaN();
    v.reason = "tail spread does not shrink: several accumulation points or unbounded values";
  } else {
    v.kind = AverageVerdict::Kind::unknown;
    v.reason = "tail still shrinking at the cutoff";
  }
  return v;
}

MeasureOracle lebesgue_increasing(double lo, double hi, RealFn f_inverse, std::string name) {
  return {[lo, hi, inv = std::move(f_inverse)](double a, double b) {
            auto clamp = [&](double v) {
              if (v == kInf) return hi;
              if (v == -kInf) return lo;
              return std::clamp(inv(v), lo, hi);
            };
            return std::max(0.0, clamp(b) - clamp(a));
          },
          hi - lo, std::move(name)};
}

MeasureOracle lebesgue_piecewise_constant(std::vector<std::pair<double, double>> pieces, std::string name) {
  double total = 0.0;
  for (const auto& [len, v] : pieces) {
    if (len < 0.0) throw std::invalid_argument("piecewise constant: negative length");
    total += len;
  }
  return {[pieces = std::move(pieces)](double a, double b) {
            double m = 0.0;
            for (const auto& [len, v] : pieces)
              if (v >= a && v < b) m += len;
            return m;
          },
          total, std::move(name)};
}

MeasureOracle point_masses(std::vector<std::pair<double, double>> masses, std::string name) {
  double total = 0.0;
  for (const auto& [v, m] : masses) {
    if (m < 0.0) throw std::invalid_argument("point masses: negative mass");
    total += m;
  }
  return {[masses = std::move(masses)](double a, double b) {
            double m = 0.0;
            for (const auto& [v, w] : masses)
              if (v >= a && v < b) m += w;
            return m;
          },
          total, std::move(name)};
}

MeasureOracle counting_decreasing(Sequence g, std::int64_t first, std::string name) {
  return {[g = std::move(g), first](double a, double b) {
            if (!(a < b)) return 0.0;
            if (a <= 0.0) return b > 0.0 ? kInf : 0.0;
            double count = 0.0;
            for (std::int64_t n = first;; ++n) {
              if (n - first > 100'000'000) throw UnresolvedError("counting layer: sequence decays too slowly");
              const double v = g(n);
              if (v < a) break;
              if (v < b) count += 1.0;
            }
            return count;
          },
          kInf, std::move(name)};
}

MeasureOracle neg_log_unit() {
  return {[](double a, double b) {
            const double lo = std::max(a, 0.0);
            if (!(b > lo)) return 0.0;
            return std::exp(-lo) - (b == kInf ? 0.0 : std::exp(-b));
          },
          1.0, "lebesgue(0,1] f=-ln x"};
}

SetFunction sf_measure_integral(MeasureOracle mu, double bound, LayerVariant variant) {
  if (!mu.layer) throw std::invalid_argument("measure integral: missing layer oracle");
  if (variant != LayerVariant::halfline && !(bound > 0.0))
    throw std::invalid_argument("measure integral: bound must be positive");
  auto name = "layer-sum(" + mu.name + ")";
  return {[mu = std::move(mu), bound, variant](const FiniteSet& h) {
            std::vector<double> a;
            a.reserve(h.size() + 3);
            for (const auto& p : h) {
              const bool ok = variant == LayerVariant::nonneg         ? p.x > 0.0 && p.x < bound
                              : variant == LayerVariant::signed_range ? p.x > -bound && p.x < bound && p.x != 0.0
                                                                      : p.x > 0.0 && std::isfinite(p.x);
              if (!ok) throw std::domain_error("layer sum: point outside the value range");
              a.push_back(p.x);
            }
            switch (variant) {
              case LayerVariant::nonneg:
                a.push_back(0.0);
                a.push_back(bound);
                break;
              case LayerVariant::signed_range:
                a.push_back(0.0);
                a.push_back(-bound);
                a.push_back(bound);
                break;
              case LayerVariant::halfline:
                a.push_back(0.0);
                a.push_back(kInf);
                break;
            }
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
            double s = 0.0;
            double mass = 0.0;
            for (std::size_t i = 0; i + 1 < a.size(); ++i) {
              const double m = mu.layer(a[i], a[i + 1]);
              if (m < 0.0 || std::isnan(m)) throw std::logic_error("measure oracle returned a negative layer");
              mass += m;
              s = ext_add(s, ext_mul(a[i], m));
            }
            const double whole = mu.layer(a.front(), a.back());
            if (std::isfinite(whole) && std::isfinite(mass) && std::abs(whole - mass) > 1e-9 * (1.0 + whole))
              throw std::logic_error("measure oracle is not additive across layers");
            return s;
          },
          DomainClass::all, name};
}

double mean_iso(const IsoSetSpec& spec, double delta) {
  if (!(delta > 0.0)) throw std::domain_error("mean_iso: delta must be positive");
  const auto pts = isolated_points(spec, delta);
  if (pts.empty()) throw std::domain_error("mean_iso: no isolated point at this distance");
  double sum = 0.0;
  for (const auto& [x, d] : pts) sum += x;
  return sum / static_cast<double>(pts.size());
}

ExtensionEstimate mean_iso_limit(const IsoSetSpec& spec, const Tolerances& tol) {
  const auto acc = accumulation_set(spec);
  double start = 0.0;
  for (double x : spec.finite) start = std::max(start, distance_to(acc, x));
  for (const auto& p : spec.pieces)
    for (std::int64_t n = 1; n <= 64; ++n) start = std::max(start, distance_to(acc, p.term(n)));
  if (!(start > 0.0)) throw std::domain_error("mean_iso_limit: no isolated points");
  return estimate_limit(
      [&](int level) {
        const double delta = std::ldexp(start, -(level - 1));
        return Rung{delta, mean_iso(spec, delta), {}};
      },
      tol);
}

std::vector<double> arrange_blocks(std::span<const double> prefix, std::vector<double> block, double bound) {
  if (block.empty()) return block;
  double sum = std::accumulate(prefix.begin(), prefix.end(), 0.0);
  double count = static_cast<double>(prefix.size());
  const double all = sum + std::accumulate(block.begin(), block.end(), 0.0);
  const double b = all / (count + static_cast<double>(block.size()));
  const double a = prefix.empty() ? b : sum / count;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  (void)bound;  // the window width only enters the guarantee, not the choice
  std::vector<double> out;
  out.reserve(block.size());
  while (!block.empty()) {
    const double cur = count > 0.0 ? sum / count : lo;
    auto pick = block.begin();
    if (cur <= lo) {
      pick = std::find_if(block.begin(), block.end(), [lo](double v) { return v >= lo; });
      if (pick == block.end()) pick = std::max_element(block.begin(), block.end());
    } else if (cur >= hi) {
      pick = std::find_if(block.begin(), block.end(), [hi](double v) { return v <= hi; });
      if (pick == block.end()) pick = std::min_element(block.begin(), block.end());
    }
    out.push_back(*pick);
    sum += *pick;
    count += 1.0;
    block.erase(pick);
  }
  return out;
}

std::vector<double> arrange_iso_sequence(const IsoSetSpec& spec, std::size_t count) {
  if (count == 0) return {};
  const auto acc = accumulation_set(spec);
  double delta = 1.0;
  for (double x : spec.finite) delta = std::max(delta, distance_to(acc, x));
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k < 200; ++k, delta /= 2.0) {
    pts = isolated_points(spec, delta);
    if (pts.size() >= count) break;
    if (spec.pieces.empty() && k > 0) break;
  }
  std::stable_sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) { return p.second > q.second; });
  std::vector<double> seq;
  seq.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size();) {
    std::size_t j = i;
    std::vector<double> group;
    while (j < pts.size() && pts[j].second == pts[i].second) group.push_back(pts[j++].first);
    auto arranged = arrange_blocks(seq, std::move(group), spec.bound);
    seq.insert(seq.end(), arranged.begin(), arranged.end());
    i = j;
    if (seq.size() >= count) break;
  }
  if (seq.size() > count) seq.resize(count);
  return seq;
}

InducedProblem sf_iso_dyadic(const IsoSetSpec& spec, std::size_t count) {
  auto seq = std::make_shared<const std::vector<double>>(arrange_iso_sequence(spec, count));
  SetFunction s{[seq](const FiniteSet& k) {
                  std::vector<double> vals;
                  vals.reserve(k.size());
                  for (const auto& p : k) {
                    const auto m = static_cast<std::size_t>(dyadic_index(p));
                    if (m < 1 || m > seq->size()) throw std::domain_error("iso sequence too short for this set");
                    vals.push_back((*seq)[m - 1]);
                  }
                  return plain_mean(vals);
                },
                DomainClass::stretched, "iso-mean"};
  return {SpaceDescriptor::dyadic(1), std::move(s)};
}

SetFunction sf_mean_eds() {
  auto s = sf_finite_mean();
  s.domain = DomainClass::class_s;
  s.name = "eds-mean";
  return s;
}

ExtensionEstimate mean_eds_limit(const SpaceDescriptor& h, const Tolerances& tol, EdsRule rule, std::uint64_t seed,
                                 int points_per_level) {
  SamplerSpec spec;
  spec.strategy = Strategy::eds_bins;
  spec.eds_rule = rule;
  spec.seed = seed;
  spec.points_per_level = points_per_level;
  return estimate_ext(sf_mean_eds(), h, spec, tol);
}

SetFunction sf_sequence_limit(Sequence a) {
  return {[a = std::move(a)](const FiniteSet& k) {
            if (k.empty()) throw std::domain_error("sequence functional: empty set");
            const auto it = std::min_element(k.begin(), k.end(), [](const Point& p, const Point& q) { return p.x < q.x; });
            const auto n = harmonic_index(*it);
            if (n < 1) throw std::domain_error("sequence functional: point is not of the form 1/n");
            return a(n);
          },
          DomainClass::all, "sequence-limit"};
}

}  // namespace hext
