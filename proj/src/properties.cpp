#include "hext/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hext/metric.hpp"
#include "hext/sampler.hpp"

namespace hext {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds_on_samples: return "holds-on-samples";
    case Verdict::counterexample: return "counterexample";
    case Verdict::unresolved: return "unresolved";
  }
  return "unknown";
}

void PredicateReport::merge(const PredicateReport& other) {
  trials += other.trials;
  skipped += other.skipped;
  if (!counterexample && other.counterexample) counterexample = other.counterexample;
  if (counterexample)
    verdict = Verdict::counterexample;
  else if (trials > 0)
    verdict = Verdict::holds_on_samples;
  else
    verdict = Verdict::unresolved;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::optional<double> try_eval(const SetFunction& s, const FiniteSet& k) {
  try {
    return s(k);
  } catch (const std::domain_error&) {
    return std::nullopt;
  } catch (const UnresolvedError&) {
    return std::nullopt;
  }
}

template <class T>
std::string str(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ";") + str(x);
  return out;
}

PredicateReport start(std::string predicate, std::uint64_t seed) {
  PredicateReport r;
  r.predicate = std::move(predicate);
  r.seed = seed;
  return r;
}

void finish(PredicateReport& r) {
  if (r.counterexample)
    r.verdict = Verdict::counterexample;
  else if (r.trials > 0)
    r.verdict = Verdict::holds_on_samples;
  else
    r.verdict = Verdict::unresolved;
}

FiniteSet merged(FiniteSet a, const FiniteSet& b) {
  a.insert(a.end(), b.begin(), b.end());
  return canonical(std::move(a));
}

FiniteSet halfline_dense(double delta, std::mt19937_64& rng) {
  auto window = SpaceDescriptor::interval(0.0, 1.0 / delta, false, false);
  auto l = random_sdense(window, delta, rng);
  std::uniform_real_distribution<double> beyond(1.0 / delta, 2.0 / delta);
  std::uniform_int_distribution<int> extra(0, 3);
  for (int e = extra(rng); e > 0; --e) l.push_back(at(beyond(rng)));
  return canonical(std::move(l));
}

// Members of the space inside the open r-ball around each point of H.
FiniteSet crowd(const SpaceDescriptor& space, const FiniteSet& h, double r, std::size_t cap) {
  FiniteSet out = h;
  const std::size_t per_side = std::max<std::size_t>(1, cap / (2 * h.size()));
  for (const auto& p : h) {
    double top = p.x + r;
    for (std::size_t i = 0; i < per_side; ++i) {
      auto m = space.member_in_open(p.x, top);
      if (!m || m->x >= top) break;
      out.push_back(*m);
      top = m->x;
    }
    double bottom = p.x;
    for (std::size_t i = 0; i < per_side; ++i) {
      auto m = space.member_in_open(p.x - r, bottom);
      if (!m || m->x >= bottom) break;
      out.push_back(*m);
      bottom = m->x;
    }
  }
  return canonical(std::move(out));
}

struct Drift {
  double value = 0.0;
  FiniteSet k;
  double value_k = 0.0;
};

// Largest |s(K) - s(H)| over perturbations of H at the given scale.
template <class Perturb>
std::optional<Drift> worst_drift(const SetFunction& s, double base, int count, Perturb&& make) {
  std::optional<Drift> worst;
  for (int i = 0; i < count; ++i) {
    auto k = make();
    if (!k) continue;
    auto v = try_eval(s, *k);
    if (!v) continue;
    const double d = std::isinf(*v) || std::isinf(base) ? (*v == base ? 0.0 : std::numeric_limits<double>::infinity()) : std::abs(*v - base);
    if (!worst || d > worst->value) worst = Drift{d, std::move(*k), *v};
  }
  return worst;
}

struct DriftLadder {
  std::vector<double> scales;
  int perturbations = 10;
  double tol = 1e-6;
};

// Shared driver for the continuity-type checks.
template <class MakeBase, class Perturb>
PredicateReport drift_check(std::string name, const SetFunction& s, const DriftLadder& ladder, int trials,
                            std::uint64_t seed, MakeBase&& make_base, Perturb&& perturb_at) {
  auto r = start(std::move(name), seed);
  if (ladder.scales.empty()) throw std::invalid_argument(r.predicate + ": empty scale ladder");
  auto scales = ladder.scales;
  std::sort(scales.begin(), scales.end(), std::greater<>());
  r.params = {{"scales", join(scales)}, {"tol", str(ladder.tol)}, {"perturbations", str(ladder.perturbations)}};
  for (int t = 0; t < trials; ++t) {
    const auto ts = trial_seed(seed, t);
    std::mt19937_64 rng(ts);
    auto h = make_base(t, rng);
    if (!h) {
      ++r.skipped;
      continue;
    }
    auto base = try_eval(s, *h);
    if (!base) {
      ++r.skipped;
      continue;
    }
    std::optional<Drift> finest;
    for (double scale : scales) {
      auto d = worst_drift(s, *base, ladder.perturbations, [&] { return perturb_at(*h, scale, rng); });
      if (d) finest = std::move(d);
    }
    if (!finest) {
      ++r.skipped;
      continue;
    }
    ++r.trials;
    if (finest->value > ladder.tol && !r.counterexample) {
      r.counterexample = Counterexample{*h, finest->k, *base, finest->value_k, ts,
                                        "drift " + str(finest->value) + " at scale " + str(scales.back())};
    }
  }
  finish(r);
  return r;
}

}  // namespace

PredicateReport check_increasing(const SetFunction& s, const SpaceDescriptor& space, int trials, std::uint64_t seed,
                                 const IncreasingParams& params) {
  auto r = start(params.decreasing ? "decreasing" : "increasing", seed);
  r.params = {{"max_base", str(params.max_base)}, {"max_extra", str(params.max_extra)}};
  for (int t = 0; t < trials; ++t) {
    const auto ts = trial_seed(seed, t);
    std::mt19937_64 rng(ts);
    std::uniform_int_distribution<int> base_size(1, params.max_base);
    std::uniform_int_distribution<int> extra_size(1, params.max_extra);
    auto k = random_subset(space, static_cast<std::size_t>(base_size(rng)), rng);
    auto l = merged(k, random_subset(space, static_cast<std::size_t>(extra_size(rng)), rng));
    const auto vk = try_eval(s, k);
    const auto vl = try_eval(s, l);
    if (k.empty() || !vk || !vl) {
      ++r.skipped;
      continue;
    }
    ++r.trials;
    const double slack = params.tol * (1.0 + std::abs(*vk));
    const bool ok = params.decreasing ? *vl <= *vk + slack : *vk <= *vl + slack;
    if (!ok && !r.counterexample) r.counterexample = Counterexample{k, l, *vk, *vl, ts, "K is a subset of L"};
  }
  finish(r);
  return r;
}

PredicateReport check_d_increasing(const SetFunction& s, const SpaceDescriptor& space, const DIncreasingParams& params,
                                   std::uint64_t seed) {
  auto r = start(params.decreasing ? "d-decreasing" : "d-increasing", seed);
  if (params.eps.empty() || params.levels < 1 || params.l_per_delta < 1)
    throw std::invalid_argument("check_d_increasing: empty parameter grid");
  const bool half = space.is_half_line();
  double delta0 = 0.5;
  if (!half) {
    const double diam = space.diameter();
    delta0 = std::isfinite(diam) && diam > 0.0 ? diam / 4.0 : 0.25;
  }
  r.params = {{"eps", join(params.eps)},
              {"delta0", str(delta0)},
              {"levels", params.recipe ? "recipe" : str(params.levels)},
              {"l_per_delta", str(params.l_per_delta)},
              {"strict", params.strict ? "yes" : "no"}};
  const int k_count = params.bases.empty() ? params.k_samples : static_cast<int>(params.bases.size());
  int trial = 0;
  for (double eps : params.eps) {
    for (int ki = 0; ki < k_count; ++ki, ++trial) {
      const auto ts = trial_seed(seed, trial);
      std::mt19937_64 rng(ts);
      FiniteSet k;
      if (params.bases.empty()) {
        std::uniform_int_distribution<int> size(1, params.max_k);
        k = random_subset(space, static_cast<std::size_t>(size(rng)), rng);
      } else {
        k = params.bases[static_cast<std::size_t>(ki)];
      }
      const auto vk = try_eval(s, k);
      if (k.empty() || !vk) {
        ++r.skipped;
        continue;
      }
      std::vector<double> deltas;
      if (params.recipe) {
        deltas.push_back(params.recipe(k, eps));
      } else {
        for (int j = 0; j < params.levels; ++j) deltas.push_back(std::ldexp(delta0, -j));
      }
      bool passed = false;
      bool evaluated = false;
      std::optional<Counterexample> failure;
      for (double delta : deltas) {
        if (!(delta > 0.0)) throw std::domain_error("check_d_increasing: non-positive delta");
        bool level_ok = true;
        for (int i = 0; i < params.l_per_delta; ++i) {
          FiniteSet l;
          try {
            l = half ? halfline_dense(std::min(delta, 0.5), rng) : random_sdense(space, delta, rng);
          } catch (const UnresolvedError&) {
            continue;
          }
          const auto vl = try_eval(s, l);
          if (!vl) continue;
          evaluated = true;
          const bool ok = params.decreasing ? (params.strict ? *vk + eps > *vl : *vk + eps >= *vl)
                                            : (params.strict ? *vk - eps < *vl : *vk - eps <= *vl);
          if (!ok) {
            level_ok = false;
            failure = Counterexample{k, std::move(l), *vk, *vl, ts,
                                     "eps " + str(eps) + ", delta " + str(delta)};
            break;
          }
        }
        if (level_ok && evaluated) {
          passed = true;
          break;
        }
      }
      if (!evaluated) {
        ++r.skipped;
        continue;
      }
      ++r.trials;
      if (!passed && !r.counterexample) r.counterexample = std::move(failure);
    }
  }
  finish(r);
  return r;
}

PredicateReport check_d_continuous(const SetFunction& s, const SpaceDescriptor& space, const ContinuityParams& params,
                                   int trials, std::uint64_t seed) {
  if (params.n < 1) throw std::invalid_argument("check_d_continuous: n must be at least 1");
  const bool crowding = params.mode == ContinuityMode::any_size;
  auto report = drift_check(
      crowding ? "continuous" : "d-continuous", s, {params.scales, params.perturbations, params.tol}, trials, seed,
      [&](int t, std::mt19937_64& rng) -> std::optional<FiniteSet> {
        if (!params.bases.empty()) return params.bases[static_cast<std::size_t>(t) % params.bases.size()];
        auto h = random_subset(space, static_cast<std::size_t>(params.n), rng);
        if (h.size() != static_cast<std::size_t>(params.n)) return std::nullopt;
        return h;
      },
      [&, toggle = false](const FiniteSet& h, double scale, std::mt19937_64& rng) mutable -> std::optional<FiniteSet> {
        toggle = !toggle;
        if (crowding && toggle && space.is_line())
          return crowd(space, h, scale, std::min<std::size_t>(params.crowd_cap, static_cast<std::size_t>(10.0 / scale)));
        return perturb(space, h, scale, crowding ? PerturbMode::any_size : PerturbMode::same_size, rng);
      });
  report.params.emplace_back("n", std::to_string(params.n));
  return report;
}

PredicateReport check_left_continuous(const SetFunction& s, const SpaceDescriptor& space,
                                      const LeftContinuityParams& params, int trials, std::uint64_t seed) {
  if (!space.is_line()) throw std::invalid_argument("check_left_continuous: needs an ordered (line) space");
  std::string name = params.mode == PerturbMode::downward      ? "left-continuous"
                     : params.mode == PerturbMode::upward      ? "right-perturbation-continuous"
                     : params.mode == PerturbMode::upward_weak ? "weak-left-continuous"
                                                               : "left-continuous(custom)";
  return drift_check(
      std::move(name), s, {params.scales, params.perturbations, params.tol}, trials, seed,
      [&](int t, std::mt19937_64& rng) -> std::optional<FiniteSet> {
        if (!params.bases.empty()) return params.bases[static_cast<std::size_t>(t) % params.bases.size()];
        auto h = random_subset(space, static_cast<std::size_t>(params.n), rng);
        if (h.empty()) return std::nullopt;
        return h;
      },
      [&](const FiniteSet& h, double scale, std::mt19937_64& rng) { return perturb(space, h, scale, params.mode, rng); });
}

PredicateReport check_l_continuous(const SetFunction& s, const SpaceDescriptor& dense, const SpaceDescriptor& outer,
                                   const LContinuityParams& params, int trials, std::uint64_t seed) {
  auto r = start("l-continuous", seed);
  r.params = {{"eps", str(params.eps)}, {"shrink", join(params.shrink)}, {"candidates", str(params.candidates)}};
  for (int t = 0; t < trials; ++t) {
    const auto ts = trial_seed(seed, t);
    std::mt19937_64 rng(ts);
    std::uniform_int_distribution<int> size(1, params.max_k);
    auto k = random_subset(outer, static_cast<std::size_t>(size(rng)), rng);
    const auto vk = try_eval(s, k);
    if (k.empty() || !vk) {
      ++r.skipped;
      continue;
    }
    const double g = gap_to_subspace(k, dense).lo;
    if (!(g > 0.0)) {
      ++r.skipped;
      continue;
    }
    bool found = false;
    bool tried = false;
    std::optional<Counterexample> closest;
    for (double f : params.shrink) {
      for (int c = 0; c < params.candidates && !found; ++c) {
        auto l = perturb(dense, k, f * g, PerturbMode::same_size, rng);
        if (!l) continue;
        if (gap_to_space(*l, dense).hi > 2.0 * g) continue;
        const auto vl = try_eval(s, *l);
        if (!vl) continue;
        tried = true;
        const double d = std::abs(*vk - *vl);
        if (d < params.eps) {
          found = true;
        } else if (!closest || d < std::abs(closest->value_k - closest->value_l)) {
          closest = Counterexample{k, *l, *vk, *vl, ts, "no L within 2*d_H(K,J) matched s(K)"};
        }
      }
      if (found) break;
    }
    if (!tried) {
      ++r.skipped;
      continue;
    }
    ++r.trials;
    if (!found && !r.counterexample) r.counterexample = std::move(closest);
  }
  finish(r);
  return r;
}

}  // namespace hext
