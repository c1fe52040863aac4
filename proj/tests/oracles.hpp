#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the library under test.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

/// Two-sided Hausdorff distance between finite sets of reals, by brute force.
inline double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  auto one_way = [](const std::vector<double>& p, const std::vector<double>& q) {
    double worst = 0.0;
    for (double x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : q) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

/// sup over a fine grid of [lo, hi] of the distance to K. Undershoots the true
/// gap by at most half the grid step.
inline double grid_gap(const std::vector<double>& k, double lo, double hi, int steps = 200000) {
  double worst = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    double best = std::numeric_limits<double>::infinity();
    for (double y : k) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

/// Closed-form gap of a finite K inside [lo, hi].
inline double interval_gap(std::vector<double> k, double lo, double hi) {
  std::sort(k.begin(), k.end());
  double g = std::max(k.front() - lo, hi - k.back());
  for (std::size_t i = 1; i < k.size(); ++i) g = std::max(g, (k[i] - k[i - 1]) / 2.0);
  return g;
}

/// Cantor points with digits d1..d_{n-1} free in {0,2} and a constant tail from digit n.
/// `first` restricts d1 (-1 = free); `pair` demands (d_{n-1}, d_n) in {(2,0),(0,2)}.
inline std::vector<Rational> cantor_family(int n, int first, bool pair) {
  std::vector<Rational> out;
  const int free_digits = n - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_digits); ++mask) {
    for (int tail : {0, 2}) {
      std::vector<int> d(static_cast<std::size_t>(n + 1), 0);
      for (int i = 1; i <= free_digits; ++i) d[static_cast<std::size_t>(i)] = (mask >> (i - 1)) & 1 ? 2 : 0;
      d[static_cast<std::size_t>(n)] = tail;
      if (first >= 0 && d[1] != first) continue;
      if (pair && !((d[static_cast<std::size_t>(n - 1)] == 2 && tail == 0) ||
                    (d[static_cast<std::size_t>(n - 1)] == 0 && tail == 2)))
        continue;
      Rational x = 0;
      Rational unit = 1;
      for (int i = 1; i < n; ++i) {
        unit /= 3;
        x += d[static_cast<std::size_t>(i)] * unit;
      }
      unit /= 3;
      x += Rational(tail) * unit * Rational(3, 2);  // 0.0..0ttt... = t * 3^-n * 3/2
      out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline Rational mean(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s / static_cast<long long>(v.size());
}

/// Alternating harmonic partial sums: ln 2 lies between consecutive ones.
inline double alternating_harmonic_partial(int n) {
  double s = 0.0;
  for (int i = n; i >= 1; --i) s += (i % 2 ? 1.0 : -1.0) / i;
  return s;
}

}  // namespace oracle
