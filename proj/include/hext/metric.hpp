#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "hext/point.hpp"
#include "hext/space.hpp"

namespace hext {

/// Certified bracket lo <= d_H(K, I) <= hi.
struct GapBound {
  double lo = 0.0;
  double hi = 0.0;
  bool exact() const { return lo == hi; }
};

using MetricOracle = std::function<double(const Point&, const Point&)>;

/// Comparison tolerance for floating-point predicates.
inline constexpr double kMetricTol = 1e-12;

double hausdorff_finite(const FiniteSet& k, const FiniteSet& l, const MetricOracle& d);
double hausdorff_finite(const FiniteSet& k, const FiniteSet& l, const SpaceDescriptor& space);

/// sup over x in `space` of dist(x, K); K need not lie in `space`.
GapBound directed_gap(const FiniteSet& k, const SpaceDescriptor& space);

/// d_H(K, I) for K a finite subset of I.
GapBound gap_to_space(const FiniteSet& k, const SpaceDescriptor& space);

/// d_H(K, J) where K may lie outside J (both directions are measured).
GapBound gap_to_subspace(const FiniteSet& k, const SpaceDescriptor& subspace);

bool is_delta_dense(const FiniteSet& k, const SpaceDescriptor& space, double delta);
bool is_sdense(const FiniteSet& k, const SpaceDescriptor& space, double delta);

/// Smallest pairwise distance between distinct points (+inf below two points).
double min_pairwise(const FiniteSet& k, const SpaceDescriptor& space);
bool is_stretched(const FiniteSet& k, const SpaceDescriptor& space);
bool is_strongly_stretched(const FiniteSet& k, const SpaceDescriptor& space);

struct ProbeSpec {
  double spacing = 1e-3;
  std::optional<std::uint64_t> shuffle_seed;  // none: deterministic kind order
};

/// Greedy net: scan probes, keep those outside the closed balls of radius
/// delta/2 around already chosen points, then fill any uncovered gap with a
/// member of the space. Output is delta-dense, strongly stretched and has
/// pairwise distances > delta/2.
FiniteSet greedy_packing(const SpaceDescriptor& space, double delta, const ProbeSpec& probe);

/// A stretched superset of K.
FiniteSet stretch_extend(const FiniteSet& k, const SpaceDescriptor& space, const ProbeSpec& probe);

/// Half-line density: K ∩ (0, 1/delta) is delta-dense in (0, 1/delta).
bool is_delta_dense_halfline(const FiniteSet& k, double delta);

/// Approximate infimum of the delta in (0,1) for which K is delta-dense on
/// the half-line (1 when none is); resolved by bisection.
double halfline_density(const FiniteSet& k);

/// The reciprocal maps of a half-line set: K ∩ (0,1) and {1/k : k in K ∩ [1, inf)}.
FiniteSet halfline_low_part(const FiniteSet& k);
FiniteSet halfline_reciprocal_part(const FiniteSet& k);

}  // namespace hext
