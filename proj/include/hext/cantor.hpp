#pragma once

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hext/point.hpp"

namespace hext {

using Rational = boost::multiprecision::cpp_rational;

/// Longest digit prefix a labelled Cantor point can carry.
inline constexpr int kCantorMaxPrefix = 40;

/// A point of the ternary Cantor set 0.d1 d2 ... dp t t t ... (base 3), with
/// digits in {0,2}. The exact digits ride in the point's label.
Point cantor_point(std::span<const int> prefix, int tail_digit);
bool is_cantor_labelled(const Point& p);
Rational cantor_exact(const Point& p);

/// The sets K_n (tail from digit n on) and L_n = L_{1,n} ∪ L_{2,n}.
struct CantorSamples {
  FiniteSet k;
  FiniteSet l1;
  FiniteSet l2;
  FiniteSet l;
};
CantorSamples cantor_samples(int n);

Rational exact_mean(const FiniteSet& cantor_points);
/// d_H(K, C) computed without rounding.
Rational exact_cantor_gap(const FiniteSet& cantor_points);
Rational exact_min_pairwise(const FiniteSet& cantor_points);
bool exact_cantor_stretched(const FiniteSet& cantor_points);

}  // namespace hext
