#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include "hext/metric.hpp"
#include "hext/point.hpp"
#include "hext/space.hpp"

namespace hext {

enum class Strategy {
  uniform_grid,       // {lo + i*L/N : 0 <= i <= N}, N = level * points_per_level
  shifted_grid,       // {lo + (i + shift)*L/N : 0 <= i < N}
  prefix,             // first N members of a sequence space
  stretched_dyadic,   // {2^-m : first <= m <= level}
  randomized_sdense,  // nested: dyadic grid of 2^level cells plus a seeded random stream
  eds_bins,           // one representative per nonempty bin
  cantor_k,           // K_{level+1}
  cantor_l,           // L_{level+1}
  adversarial_tail,   // prefix plus the largest positive tail terms
  halfline_grid,      // step h = 1/(N+1) out to 1/h^2 on (0, inf)
  custom,
};

enum class PrefixParity { any, even, odd };

/// Representative choice inside an eds bin.
enum class EdsRule { midpoint, infimum_side, random };

struct AdversarialTail {
  std::function<double(std::int64_t)> a;
  int prefix_per_level = 10;
  int extra_per_level = 20;
  std::int64_t horizon = 100000;  // tail indices searched beyond the prefix
};

struct SamplerSpec {
  Strategy strategy = Strategy::uniform_grid;
  std::uint64_t seed = 0;
  int points_per_level = 1;
  double shift = 0.25;
  bool tag_irrational = false;
  PrefixParity parity = PrefixParity::any;
  EdsRule eds_rule = EdsRule::midpoint;
  AdversarialTail adversarial;
  std::function<FiniteSet(int level)> custom;
  std::string label;  // shown in witnesses and reports

  std::string name() const;
};

/// A sampled set with its certified distance to the space.
struct Sample {
  FiniteSet points;
  GapBound gap;
};

/// Level-th set of the ladder. Throws std::invalid_argument when the strategy
/// does not apply to the space kind.
Sample refine(const SpaceDescriptor& space, const SamplerSpec& spec, int level);

/// One representative from each nonempty bin [a + i w, a + (i+1) w), i < n,
/// w = (b - a)/n; the last bin also holds b.
FiniteSet eds_bins(const SpaceDescriptor& space, int bins, EdsRule rule, std::mt19937_64& rng);

/// Nested refinement of the random eds rule: 2^level bins, each new bin
/// inheriting its parent's representative when it holds it.
FiniteSet eds_bins_nested_random(const SpaceDescriptor& space, int level, std::uint64_t seed);

FiniteSet adversarial_series_sampler(const AdversarialTail& tail, int level);

// Random families used by the property checks.
FiniteSet random_subset(const SpaceDescriptor& space, std::size_t count, std::mt19937_64& rng);
/// A random finite set whose gap is below delta (verified).
FiniteSet random_sdense(const SpaceDescriptor& space, double delta, std::mt19937_64& rng);

enum class PerturbMode {
  same_size,    // |K| = |H|, each point moved by < delta
  any_size,     // d_H(H, K) < delta, any cardinality
  downward,     // every b in K lies below some a in H within delta
  upward_weak,  // every a in H has some b <= a in K within delta
  upward,       // |K| = |H|, each point moved up by < delta
};
/// Random K near H, or nullopt when the space offers no such set.
std::optional<FiniteSet> perturb(const SpaceDescriptor& space, const FiniteSet& h, double delta,
                                 PerturbMode mode, std::mt19937_64& rng);

}  // namespace hext
