#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "hext/point.hpp"

namespace hext {

/// Which reals of an interval belong to the space. Doubles are all rational;
/// the `irrational` tag of a Point stands in for the irrational members.
enum class Density { all, rationals, irrationals };

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool closed_lo = true;
  bool closed_hi = true;
  Density density = Density::all;
};

/// {1/n : n >= 1} together with finitely many extra points.
struct HarmonicSet {
  std::vector<double> extra;
};

/// {2^-n : n >= first_exponent}.
struct DyadicSet {
  int first_exponent = 1;
};

/// An index universe {first, first+1, ...} with pseudo-metric |a(i) - a(j)|.
/// The closure of the image is resolved from the first `resolved` indices and
/// the declared accumulation values; `tail_bound(R)` must bound
/// sup_{i >= first+R} dist(a(i), limits).
struct FunctionInduced {
  std::function<double(std::int64_t)> a;
  std::int64_t first = 1;
  std::vector<double> limits;
  std::function<double(std::int64_t)> tail_bound;
  std::int64_t resolved = 4096;
  // sorted (value, index) pairs of the resolved prefix
  std::shared_ptr<const std::vector<std::pair<double, std::int64_t>>> anchors;
};

struct CantorTernary {};

struct UnionOfIntervals {
  std::vector<Interval> pieces;  // sorted, pairwise disjoint
};

/// (0, +inf); only usable through the half-line density notion.
struct HalfLine {};

class SpaceDescriptor;

/// Product with the sum metric d1 + d2. Both factors must be line spaces.
struct Product {
  std::shared_ptr<const SpaceDescriptor> first;
  std::shared_ptr<const SpaceDescriptor> second;
};

enum class Meet { no, yes, unknown };

class SpaceDescriptor {
 public:
  using Kind = std::variant<Interval, HarmonicSet, DyadicSet, FunctionInduced, CantorTernary,
                            UnionOfIntervals, HalfLine, Product>;

  static SpaceDescriptor interval(double lo, double hi, bool closed_lo = true,
                                  bool closed_hi = true);
  static SpaceDescriptor rationals(double lo, double hi);
  static SpaceDescriptor irrationals(double lo, double hi);
  static SpaceDescriptor harmonic(std::vector<double> extra = {});
  static SpaceDescriptor dyadic(int first_exponent = 1);
  static SpaceDescriptor function_induced(std::function<double(std::int64_t)> a,
                                          std::vector<double> limits,
                                          std::function<double(std::int64_t)> tail_bound,
                                          std::int64_t first = 1, std::int64_t resolved = 4096);
  static SpaceDescriptor cantor();
  static SpaceDescriptor union_of(std::vector<Interval> pieces);
  static SpaceDescriptor half_line();
  static SpaceDescriptor product(SpaceDescriptor first, SpaceDescriptor second);

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// Points live on the real line with distance |x - y| (function-induced
  /// spaces use their image values as x).
  bool is_line() const;
  bool is_product() const { return std::holds_alternative<Product>(kind_); }
  bool is_half_line() const { return std::holds_alternative<HalfLine>(kind_); }
  /// Gap computations are exact (lo == hi) for arbitrary finite subsets.
  bool exact_gap() const;

  double distance(const Point& p, const Point& q) const;
  bool contains(const Point& p) const;

  // Closure oracles for line spaces.
  double infimum() const;
  double supremum() const;
  double diameter() const;
  std::optional<double> closure_floor(double x) const;
  std::optional<double> closure_ceil(double x) const;
  /// Width of the bracket left open by unresolved parts of the closure
  /// (zero except for function-induced spaces).
  double closure_slack() const;

  /// Whether the space meets the closed interval [p, q].
  Meet meets(double p, double q) const;
  /// Some member strictly inside (u, v), preferring the largest for
  /// sequence sets and the midpoint for continua.
  std::optional<Point> member_in_open(double u, double v) const;
  /// The member located at x, if any.
  std::optional<Point> member_at(double x) const;
  /// A uniformly drawn member of (u, v) intersected with the space.
  std::optional<Point> random_member_in(double u, double v, std::mt19937_64& rng) const;
  std::optional<Point> random_member(std::mt19937_64& rng) const;

  /// Finite set of members such that every point of the space lies within
  /// spacing/2 of one of them. Ordered left to right.
  FiniteSet probes(double spacing) const;

  /// Greedy scans go largest-first on sequence sets, leftmost-first otherwise.
  bool scan_descending() const;

  const SpaceDescriptor& first_factor() const;
  const SpaceDescriptor& second_factor() const;

 private:
  explicit SpaceDescriptor(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Membership test for an open/closed interval at a coordinate.
bool interval_holds(const Interval& iv, double x);

}  // namespace hext
