#include "hext/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace hext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sorted_xs(const FiniteSet& k) {
  auto xs = coordinates(k);
  std::sort(xs.begin(), xs.end());
  return xs;
}

// Largest distance from a closure point of a line space to the sorted xs.
double line_directed_gap(const std::vector<double>& xs, const SpaceDescriptor& space) {
  const double lo = space.infimum();
  const double hi = space.supremum();
  double best = 0.0;
  if (lo < xs.front()) best = std::max(best, xs.front() - lo);
  if (hi > xs.back()) best = std::max(best, hi - xs.back());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double a = xs[i];
    const double b = xs[i + 1];
    if (!(b > a)) continue;
    // Skip segments that the closure cannot enter.
    if (b <= lo || a >= hi) continue;
    const double m = a + (b - a) / 2.0;
    if (auto f = space.closure_floor(m); f && *f > a) best = std::max(best, std::min(*f - a, b - *f));
    if (auto c = space.closure_ceil(m); c && *c < b) best = std::max(best, std::min(*c - a, b - *c));
  }
  return best;
}

// The distinct coordinates of K if K is a full product A x B.
std::optional<std::pair<FiniteSet, FiniteSet>> as_product_set(const FiniteSet& k) {
  std::set<double> xs;
  std::set<double> ys;
  std::set<std::pair<double, double>> pairs;
  for (const auto& p : k) {
    xs.insert(p.x);
    ys.insert(p.y);
    pairs.emplace(p.x, p.y);
  }
  if (pairs.size() != xs.size() * ys.size()) return std::nullopt;
  FiniteSet a;
  FiniteSet b;
  for (double x : xs) a.push_back(at(x));
  for (double y : ys) b.push_back(at(y));
  return std::make_pair(std::move(a), std::move(b));
}

double dist_to_set(const Point& p, const FiniteSet& k, const SpaceDescriptor& space) {
  double best = kInf;
  for (const auto& q : k) best = std::min(best, space.distance(p, q));
  return best;
}

GapBound probe_bracket(const FiniteSet& k, const SpaceDescriptor& space, double spacing) {
  double lo = 0.0;
  for (const auto& p : space.probes(spacing)) lo = std::max(lo, dist_to_set(p, k, space));
  return {lo, lo + spacing / 2.0};
}

GapBound product_gap(const FiniteSet& k, const SpaceDescriptor& space, double bracket_spacing) {
  if (auto parts = as_product_set(k)) {
    const auto g1 = directed_gap(parts->first, space.first_factor());
    const auto g2 = directed_gap(parts->second, space.second_factor());
    return {g1.lo + g2.lo, g1.hi + g2.hi};
  }
  return probe_bracket(k, space, bracket_spacing);
}

double default_bracket_spacing(const SpaceDescriptor& space) {
  const double d = space.diameter();
  return d > 0.0 ? d / 128.0 : 1.0;
}

bool line_delta_dense(const std::vector<double>& xs, const SpaceDescriptor& space, double delta) {
  auto uncovered = [&](double p, double q) { return space.meets(p, q) != Meet::no; };
  if (uncovered(-kInf, xs.front() - delta)) return false;
  if (uncovered(xs.back() + delta, kInf)) return false;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double p = xs[i] + delta;
    const double q = xs[i + 1] - delta;
    if (p <= q && uncovered(p, q)) return false;
  }
  return true;
}

// Greedy scan followed by gap completion. `radius` is the closed exclusion
// radius; seeds are kept unconditionally.
FiniteSet greedy_core(const SpaceDescriptor& space, double radius, FiniteSet seeds, const ProbeSpec& probe) {
  auto probes = space.probes(probe.spacing);
  if (space.scan_descending()) std::reverse(probes.begin(), probes.end());
  if (probe.shuffle_seed) {
    std::mt19937_64 rng(*probe.shuffle_seed);
    std::shuffle(probes.begin(), probes.end(), rng);
  }
  FiniteSet chosen = std::move(seeds);
  if (space.is_line()) {
    // Chosen coordinates kept sorted for O(log n) neighbour queries.
    std::multiset<double> xs;
    for (const auto& c : chosen) xs.insert(c.x);
    auto clear_of = [&](double x) {
      auto it = xs.lower_bound(x);
      if (it != xs.end() && *it - x <= radius + kMetricTol) return false;
      if (it != xs.begin() && x - *std::prev(it) <= radius + kMetricTol) return false;
      return true;
    };
    for (const auto& p : probes) {
      if (clear_of(p.x)) {
        chosen.push_back(p);
        xs.insert(p.x);
      }
    }
    if (chosen.empty()) {
      auto any = space.member_in_open(-kInf, kInf);
      if (!any) throw UnresolvedError("greedy packing: space has no locatable member");
      chosen.push_back(*any);
      xs.insert(any->x);
    }
    // Completion: any member outside the closed balls joins the net.
    for (bool grew = true; grew;) {
      grew = false;
      std::vector<double> v(xs.begin(), xs.end());
      auto try_add = [&](double u, double w) {
        if (!(u < w)) return false;
        auto m = space.member_in_open(u, w);
        if (!m) return false;
        chosen.push_back(*m);
        xs.insert(m->x);
        return true;
      };
      if (try_add(-kInf, v.front() - radius)) grew = true;
      if (try_add(v.back() + radius, kInf)) grew = true;
      for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (try_add(v[i] + radius, v[i + 1] - radius)) grew = true;
    }
  } else {
    for (const auto& p : probes) {
      const bool clear = std::all_of(chosen.begin(), chosen.end(),
                                     [&](const Point& c) { return space.distance(c, p) > radius; });
      if (clear) chosen.push_back(p);
    }
  }
  return canonical(std::move(chosen));
}

}  // namespace

double hausdorff_finite(const FiniteSet& k, const FiniteSet& l, const MetricOracle& d) {
  if (k.empty() || l.empty()) throw std::domain_error("hausdorff_finite: empty input");
  auto directed = [&](const FiniteSet& a, const FiniteSet& b) {
    double worst = 0.0;
    for (const auto& p : a) {
      double best = kInf;
      for (const auto& q : b) best = std::min(best, d(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(k, l), directed(l, k));
}

double hausdorff_finite(const FiniteSet& k, const FiniteSet& l, const SpaceDescriptor& space) {
  if (k.empty() || l.empty()) throw std::domain_error("hausdorff_finite: empty input");
  if (space.is_product())
    return hausdorff_finite(k, l, [&](const Point& p, const Point& q) { return space.distance(p, q); });
  const auto ks = sorted_xs(k);
  const auto ls = sorted_xs(l);
  auto directed = [](const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (double x : a) {
      auto it = std::lower_bound(b.begin(), b.end(), x);
      double best = kInf;
      if (it != b.end()) best = *it - x;
      if (it != b.begin()) best = std::min(best, x - *std::prev(it));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(ks, ls), directed(ls, ks));
}

GapBound directed_gap(const FiniteSet& k, const SpaceDescriptor& space) {
  if (k.empty()) {
    const double d = space.diameter();
    return {d / 2.0, d};
  }
  if (space.is_product()) return product_gap(k, space, default_bracket_spacing(space));
  if (space.is_half_line()) return {kInf, kInf};
  const double g = line_directed_gap(sorted_xs(k), space);
  return {g, g + space.closure_slack()};
}

GapBound gap_to_space(const FiniteSet& k, const SpaceDescriptor& space) { return directed_gap(k, space); }

GapBound gap_to_subspace(const FiniteSet& k, const SpaceDescriptor& subspace) {
  auto g = directed_gap(k, subspace);
  if (k.empty() || subspace.is_product()) return g;
  double outward = 0.0;
  for (const auto& p : k) {
    double best = kInf;
    if (auto f = subspace.closure_floor(p.x)) best = std::min(best, p.x - *f);
    if (auto c = subspace.closure_ceil(p.x)) best = std::min(best, *c - p.x);
    outward = std::max(outward, best);
  }
  return {std::max(g.lo, outward), std::max(g.hi, outward + subspace.closure_slack())};
}

bool is_delta_dense(const FiniteSet& k, const SpaceDescriptor& space, double delta) {
  if (k.empty() || !(delta > 0.0)) return false;
  if (space.is_product()) {
    if (auto parts = as_product_set(k)) {
      const auto g1 = directed_gap(parts->first, space.first_factor());
      const auto g2 = directed_gap(parts->second, space.second_factor());
      // Conservative at equality: attainment of the sup is not decided.
      return g1.hi + g2.hi < delta;
    }
    return probe_bracket(k, space, std::min(default_bracket_spacing(space), delta / 8.0)).hi < delta;
  }
  return line_delta_dense(sorted_xs(k), space, delta);
}

bool is_sdense(const FiniteSet& k, const SpaceDescriptor& space, double delta) {
  if (!(delta > 0.0) || k.empty()) return false;
  return gap_to_space(k, space).hi < delta;
}

double min_pairwise(const FiniteSet& k, const SpaceDescriptor& space) {
  if (k.size() < 2) return kInf;
  double best = kInf;
  if (space.is_product()) {
    for (std::size_t i = 0; i < k.size(); ++i)
      for (std::size_t j = i + 1; j < k.size(); ++j) best = std::min(best, space.distance(k[i], k[j]));
    return best;
  }
  const auto xs = sorted_xs(k);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) best = std::min(best, xs[i + 1] - xs[i]);
  return best;
}

bool is_stretched(const FiniteSet& k, const SpaceDescriptor& space) {
  if (k.size() < 2) return true;
  return min_pairwise(k, space) - gap_to_space(k, space).hi >= -kMetricTol;
}

bool is_strongly_stretched(const FiniteSet& k, const SpaceDescriptor& space) {
  if (k.size() < 2) return true;
  return min_pairwise(k, space) - gap_to_space(k, space).hi > kMetricTol;
}

FiniteSet greedy_packing(const SpaceDescriptor& space, double delta, const ProbeSpec& probe) {
  if (!(delta > 0.0)) throw std::domain_error("greedy_packing: delta must be positive");
  if (!(probe.spacing > 0.0) || probe.spacing >= delta / 2.0)
    throw UnresolvedError("greedy_packing: probe spacing must be below delta/2");
  auto net = greedy_core(space, delta / 2.0, {}, probe);
  if (min_pairwise(net, space) <= delta / 2.0)
    throw UnresolvedError("greedy_packing: pairwise separation check failed");
  if (!is_delta_dense(net, space, delta)) throw UnresolvedError("greedy_packing: net is not delta-dense");
  if (!is_strongly_stretched(net, space)) throw UnresolvedError("greedy_packing: net is not strongly stretched");
  return net;
}

FiniteSet stretch_extend(const FiniteSet& k, const SpaceDescriptor& space, const ProbeSpec& probe) {
  if (k.empty()) {
    const double d = space.diameter();
    if (d == 0.0) {
      auto any = space.probes(1.0);
      if (any.empty()) throw UnresolvedError("stretch_extend: empty space");
      return {any.front()};
    }
    ProbeSpec p = probe;
    p.spacing = std::min(probe.spacing, d / 8.0);
    return greedy_packing(space, d / 2.0, p);
  }
  auto base = canonical(k);
  if (is_stretched(base, space)) return base;
  const double delta = min_pairwise(base, space);
  if (delta == 0.0)
    throw std::domain_error("stretch_extend: two points at distance zero with a positive gap");
  if (probe.spacing >= delta / 2.0) throw UnresolvedError("stretch_extend: probe spacing must be below half the minimum distance");
  auto out = greedy_core(space, delta / 2.0, base, probe);
  if (!is_stretched(out, space)) throw UnresolvedError("stretch_extend: result is not stretched");
  return out;
}

bool is_delta_dense_halfline(const FiniteSet& k, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw std::domain_error("is_delta_dense_halfline: delta must lie in (0,1)");
  const double window = 1.0 / delta;
  FiniteSet inside;
  for (const auto& p : k)
    if (p.x > 0.0 && p.x < window) inside.push_back(p);
  if (inside.empty()) return false;
  return is_delta_dense(inside, SpaceDescriptor::interval(0.0, window, false, false), delta);
}

double halfline_density(const FiniteSet& k) {
  const double top = 1.0 - 1e-12;
  if (!is_delta_dense_halfline(k, top)) return 1.0;
  double lo = 0.0;
  double hi = top;
  for (int i = 0; i < 60; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= 0.0) break;
    if (is_delta_dense_halfline(k, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

FiniteSet halfline_low_part(const FiniteSet& k) {
  FiniteSet out;
  for (const auto& p : k)
    if (p.x > 0.0 && p.x < 1.0) out.push_back(p);
  return canonical(std::move(out));
}

FiniteSet halfline_reciprocal_part(const FiniteSet& k) {
  FiniteSet out;
  for (const auto& p : k)
    if (p.x >= 1.0) out.push_back(at(1.0 / p.x));
  return canonical(std::move(out));
}

}  // namespace hext
