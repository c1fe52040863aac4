#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hext/ext_engine.hpp"
#include "hext/space.hpp"

namespace hext {

// Sampling-based structural checks. A "holds" verdict only means no sampled
// trial broke the predicate.

enum class Verdict { holds_on_samples, counterexample, unresolved };
std::string to_string(Verdict v);

struct Counterexample {
  FiniteSet k, l;
  double value_k = 0.0;
  double value_l = 0.0;
  std::uint64_t trial_seed = 0;  // reseed a std::mt19937_64 with this to replay
  std::string detail;
};

struct PredicateReport {
  std::string predicate;
  Verdict verdict = Verdict::unresolved;
  int trials = 0;   // trials that reached a decision
  int skipped = 0;  // trials the function or sampler could not evaluate
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<Counterexample> counterexample;

  bool holds() const { return verdict == Verdict::holds_on_samples; }
  /// Combine reports of the same check run on disjoint trials.
  void merge(const PredicateReport& other);
};

/// Independent per-trial seed derived from the report seed.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

struct IncreasingParams {
  int max_base = 6;   // |K| drawn from 1..max_base
  int max_extra = 6;  // |L \ K| drawn from 1..max_extra
  bool decreasing = false;
  double tol = 1e-12;
};
PredicateReport check_increasing(const SetFunction& s, const SpaceDescriptor& space, int trials, std::uint64_t seed,
                                 const IncreasingParams& params = {});

using DeltaRecipe = std::function<double(const FiniteSet& k, double eps)>;

struct DIncreasingParams {
  std::vector<double> eps{1e-1, 1e-2};
  int k_samples = 5;
  int max_k = 5;
  std::vector<FiniteSet> bases;  // fixed K sets, used instead of random ones
  int levels = 8;                // halving ladder from diameter/4
  int l_per_delta = 20;
  bool strict = true;  // s(K) - eps < s(L); otherwise <=
  bool decreasing = false;
  DeltaRecipe recipe;  // a single prescribed delta instead of the ladder
};
PredicateReport check_d_increasing(const SetFunction& s, const SpaceDescriptor& space, const DIncreasingParams& params,
                                   std::uint64_t seed);

enum class ContinuityMode {
  fixed_size,  // perturbations keep |K| (d-continuity)
  any_size,    // perturbations may crowd in extra points (continuity on all finite sets)
};

struct ContinuityParams {
  int n = 3;
  std::vector<double> scales{1e-2, 1e-4, 1e-6, 1e-9};
  int perturbations = 10;  // per scale
  double tol = 1e-6;       // allowed drift at the finest scale
  ContinuityMode mode = ContinuityMode::fixed_size;
  std::vector<FiniteSet> bases;
  std::size_t crowd_cap = 200000;
};
PredicateReport check_d_continuous(const SetFunction& s, const SpaceDescriptor& space, const ContinuityParams& params,
                                   int trials, std::uint64_t seed);

struct LeftContinuityParams {
  int n = 3;
  std::vector<double> scales{1e-2, 1e-4, 1e-6, 1e-9};
  int perturbations = 10;
  double tol = 1e-6;
  /// downward: the definition; upward: each point moves up; upward_weak: every
  /// point of H keeps a lower neighbour but extra points may sit above.
  PerturbMode mode = PerturbMode::downward;
  std::vector<FiniteSet> bases;
};
PredicateReport check_left_continuous(const SetFunction& s, const SpaceDescriptor& space,
                                      const LeftContinuityParams& params, int trials, std::uint64_t seed);

struct LContinuityParams {
  double eps = 1e-3;
  int max_k = 6;
  std::vector<double> shrink{1.0, 1e-1, 1e-2, 1e-4, 1e-6};  // candidate radii as fractions of d_H(K, J)
  int candidates = 10;                                       // per radius
};
/// For sampled K in `outer`, searches L in `dense` with d_H(L, dense) <= 2 d_H(K, dense)
/// and |s(K) - s(L)| < eps.
PredicateReport check_l_continuous(const SetFunction& s, const SpaceDescriptor& dense, const SpaceDescriptor& outer,
                                   const LContinuityParams& params, int trials, std::uint64_t seed);

}  // namespace hext
