#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hext/ext_engine.hpp"
#include "hext/space.hpp"

namespace hext {

using Sequence = std::function<double(std::int64_t)>;
using RealFn = std::function<double(double)>;

struct SeriesSpec {
  Sequence a;
  std::string name = "series";
};

/// A function-induced space together with the set-function living on it.
struct InducedProblem {
  SpaceDescriptor space;
  SetFunction s;
};

// Elementary functionals.
SetFunction sf_constant(double c);
SetFunction sf_midpoint();  // (min K + max K)/2
SetFunction sf_diameter(const SpaceDescriptor& space);
SetFunction sf_finite_sum();   // sum of coordinates
SetFunction sf_finite_mean();  // arithmetic mean of coordinates
/// 1 when every point belongs to `sub`, else 0.
SetFunction sf_indicator_subset(SpaceDescriptor sub);
/// 0 when every point is rational-tagged, else 1 (two complementary dense halves of an interval).
SetFunction sf_two_dense_indicator();
/// On {2^-m}: plain sum for even |K|; for odd |K|, drop min K and subtract 1/|K|.
SetFunction sf_parity_dyadic();
/// c1*s1 + c2*s2.
SetFunction sf_linear(double c1, const SetFunction& s1, double c2, const SetFunction& s2);
/// s(K) evaluated on the points that fail `drop`.
SetFunction sf_ignoring(const SetFunction& s, std::function<bool(const Point&)> drop, std::string name);
/// s(f(K)) for a map of the line.
SetFunction sf_pullback(const SetFunction& s, RealFn f, std::string name);
/// F(s1(K ∩ A), s2(K ∩ B)) for two disjoint line pieces given as membership tests.
SetFunction sf_split(std::function<double(double, double)> combine, const SetFunction& s1,
                     std::function<bool(double)> in_first, const SetFunction& s2, std::function<bool(double)> in_second,
                     std::string name);
/// (min x + max x)/2 + (min y + max y)/2 on planar sets.
SetFunction sf_product_midpoint_sum();

// Series.
/// s(H) = sum of a(1/h) over H, on {1/n}.
SetFunction sf_series_harmonic(SeriesSpec spec);
/// s(H) = sum of a(-log2 h) over H, on {2^-n}; stretched sets only.
SetFunction sf_series_dyadic(SeriesSpec spec);
/// Sum over an index universe with the pseudo-metric |a(i) - a(j)|.
InducedProblem sf_unordered_sum(Sequence a, std::vector<double> limits, Sequence tail_bound, std::int64_t first = 1);

// Integrals and lengths on intervals.
/// f(a1)(a2 - a0) + f(a3)(a4 - a2) + ... over H ∪ {lo, hi}; odd tails use f(hi).
SetFunction sf_riemann(RealFn f, double lo, double hi);
using SupOracle = std::function<double(double, double)>;
/// Upper sum with sup f over each closed cell of H ∪ {lo, hi}; without an oracle, probes f.
SetFunction sf_darboux_upper(RealFn f, double lo, double hi, SupOracle sup);
/// Probe-based supremum over `samples` interior points plus the endpoints; may underestimate.
SupOracle probe_sup(RealFn f, int samples);
using Curve = std::function<std::vector<double>(double)>;
SetFunction sf_polygon_length(Curve gamma);
/// Total length of consecutive sample gaps whose open span lies inside `h`.
SetFunction sf_inner_jordan(const SpaceDescriptor& h);

// Means over index universes.
struct MeanSpec {
  std::function<double(std::span<const double>)> mean;
  bool permutation_invariant = false;
  bool prefix_continuous = false;
  bool interval_stable = false;
  std::string name = "mean";
};
MeanSpec arithmetic_mean();

struct RegularityReport {
  bool permutation_ok = true;
  bool prefix_ok = true;
  bool interval_ok = true;
  bool regular() const { return permutation_ok && prefix_ok && interval_ok; }
};
/// Randomized spot checks of the flags a mean claims.
RegularityReport spot_check_regularity(const MeanSpec& mean, std::uint64_t seed, int trials = 50);

InducedProblem sf_unordered_mean(Sequence a, MeanSpec mean, std::vector<double> limits, Sequence tail_bound,
                                 std::int64_t first = 1);

struct AverageVerdict {
  enum class Kind { exists, not_exists, unknown };
  Kind kind = Kind::unknown;
  double value = 0.0;
  std::string reason;
};
/// Decides existence of the unordered average from the tail of a over [first, first + cutoff).
AverageVerdict unordered_average_oracle(const Sequence& a, std::int64_t first = 1, std::int64_t cutoff = 1'000'000,
                                        double tol = 1e-6);

// Layer sums.
struct MeasureOracle {
  std::function<double(double lo, double hi)> layer;  // measure of f^-1([lo, hi)); hi may be +inf
  double total = 0.0;                                  // may be +inf
  std::string name;
};
/// Lebesgue measure on [lo, hi] pulled back through an increasing f with inverse.
MeasureOracle lebesgue_increasing(double lo, double hi, RealFn f_inverse, std::string name);
/// Lebesgue measure with f constant on pieces: (length, value) pairs. Null sets are ignored.
MeasureOracle lebesgue_piecewise_constant(std::vector<std::pair<double, double>> pieces, std::string name);
/// Point masses (value, mass).
MeasureOracle point_masses(std::vector<std::pair<double, double>> masses, std::string name);
/// Counting measure on {first, first+1, ...} with f(n) = g(n) decreasing to 0.
MeasureOracle counting_decreasing(Sequence g, std::int64_t first, std::string name);
/// Lebesgue on (0, 1] with f(x) = -ln x.
MeasureOracle neg_log_unit();

enum class LayerVariant { nonneg, signed_range, halfline };
SetFunction sf_measure_integral(MeasureOracle mu, double bound, LayerVariant variant);

// Generalized means of subsets of the line.
struct ConvergentPiece {
  Sequence term;  // term(n), n >= 1; distance to `limit` must not increase with n
  double limit = 0.0;
};
struct IsoSetSpec {
  std::vector<ConvergentPiece> pieces;
  std::vector<double> finite;
  double bound = 1.0;  // every |h| < bound
};
/// Mean of the points at distance >= delta from the accumulation set.
double mean_iso(const IsoSetSpec& spec, double delta);
/// Limit of mean_iso over delta = diameter/2^k.
ExtensionEstimate mean_iso_limit(const IsoSetSpec& spec, const Tolerances& tol);
/// Orders `block` after `prefix` so every running mean stays inside the window between
/// the prefix mean and the full mean, widened by 2*bound/(|prefix|+1).
std::vector<double> arrange_blocks(std::span<const double> prefix, std::vector<double> block, double bound);
/// First `count` isolated points, grouped by decreasing distance to the accumulation set
/// and arranged block by block.
std::vector<double> arrange_iso_sequence(const IsoSetSpec& spec, std::size_t count);
/// The arranged sequence placed on {2^-m}; stretched-only mean.
InducedProblem sf_iso_dyadic(const IsoSetSpec& spec, std::size_t count);

SetFunction sf_mean_eds();
ExtensionEstimate mean_eds_limit(const SpaceDescriptor& h, const Tolerances& tol, EdsRule rule = EdsRule::midpoint,
                                 std::uint64_t seed = 0, int points_per_level = 1);

/// s(K) = a(1/min K) on {1/n}.
SetFunction sf_sequence_limit(Sequence a);

}  // namespace hext
