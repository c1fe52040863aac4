#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace hext {

/// A point of a space. Line spaces use `x` only; products use `x` and `y`.
/// Indexed spaces (sequence sets, function-induced spaces) identify a point by
/// `label`, so two distinct points may sit at pseudo-distance zero.
struct Point {
  double x = 0.0;
  double y = 0.0;
  std::int64_t label = 0;
  // Membership tag for the dense-subspace scenarios: the point stands for an
  // irrational number located at `x`.
  bool irrational = false;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point at(double x) { return Point{x, 0.0, 0, false}; }
inline Point at_irrational(double x) { return Point{x, 0.0, 0, true}; }
inline Point indexed(double x, std::int64_t label) { return Point{x, 0.0, label, false}; }
inline Point planar(double x, double y) { return Point{x, y, 0, false}; }

using FiniteSet = std::vector<Point>;

/// Thrown when a sampler or predicate cannot resolve the space at the
/// requested precision (probe grid too coarse, undecidable bin, ...).
class UnresolvedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orders by x, then y, then label; the canonical order of a FiniteSet.
bool point_less(const Point& a, const Point& b);

/// Sorts and removes duplicate identities.
FiniteSet canonical(FiniteSet set);

FiniteSet make_set(std::initializer_list<double> xs);

std::vector<double> coordinates(const FiniteSet& set);

}  // namespace hext
