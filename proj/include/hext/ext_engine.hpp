#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hext/metric.hpp"
#include "hext/point.hpp"
#include "hext/sampler.hpp"
#include "hext/space.hpp"

namespace hext {

/// Sets a set-function accepts.
enum class DomainClass { all, stretched, class_s };

/// A pure map from finite sets to the extended reals (+inf and -inf allowed, NaN never).
struct SetFunction {
  std::function<double(const FiniteSet&)> evaluate;
  DomainClass domain = DomainClass::all;
  std::string name;

  double operator()(const FiniteSet& k) const;
};

// Extended-real arithmetic with 0 * inf = 0.
double ext_add(double a, double b);
double ext_mul(double a, double b);

enum class Status { converged, diverges_plus, diverges_minus, no_extension_evidence, inconclusive };
std::string to_string(Status s);

enum class Schedule { linear, doubling };

struct Tolerances {
  double tol_abs = 1e-9;
  int window = 4;
  double divergence_threshold = 1e9;
  double separation = 1e-8;
  int min_level = 1;
  int max_level = 60;
  int step = 1;
  Schedule schedule = Schedule::linear;
  // Ramp rule for slow divergence on a doubling schedule: the last `window`
  // values rise (or fall) by at least this much per level.
  double ramp_min_step = 0.25;

  void validate() const;
  std::vector<int> levels() const;
};

struct TraceRow {
  int level = 0;
  double gap_hi = 0.0;
  double value = 0.0;
  double running = 0.0;  // midpoint of the current stabilization window
};

/// Two sets of comparable gap whose values disagree.
struct Witness {
  FiniteSet first, second;
  double gap_first = 0.0, gap_second = 0.0;
  double value_first = 0.0, value_second = 0.0;
  std::string sampler_first, sampler_second;
};

struct ExtensionEstimate {
  Status status = Status::inconclusive;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::optional<Witness> witness;
  std::vector<TraceRow> trace;
  std::vector<TraceRow> second_trace;  // cross checks only
  Tolerances tol;
  FiniteSet last_set;
};

/// Evaluation failure at one level of a ladder.
class LevelError : public std::runtime_error {
 public:
  LevelError(int level, const std::string& what)
      : std::runtime_error("level " + std::to_string(level) + ": " + what), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

ExtensionEstimate estimate_ext(const SetFunction& s, const SpaceDescriptor& space, const SamplerSpec& spec,
                               const Tolerances& tol);

/// As estimate_ext, but every sampled set must be stretched (std::logic_error otherwise).
ExtensionEstimate estimate_ext_stretched(const SetFunction& s, const SpaceDescriptor& space,
                                         const SamplerSpec& spec, const Tolerances& tol);

/// Runs two ladders and compares their limits.
ExtensionEstimate cross_check(const SetFunction& s, const SpaceDescriptor& space, const SamplerSpec& first,
                              const SamplerSpec& second, const Tolerances& tol);

/// One rung of a generic ladder.
struct Rung {
  double gap = 0.0;
  double value = 0.0;
  FiniteSet points;
};

/// Window-criterion limit of an arbitrary ladder; the gap column must not increase.
ExtensionEstimate estimate_limit(const std::function<Rung(int level)>& rung, const Tolerances& tol);

/// Samples inside `outer` while measuring the gap against the subspace `target`.
ExtensionEstimate estimate_ext_within(const SetFunction& s, const SpaceDescriptor& target,
                                      const SpaceDescriptor& outer, const SamplerSpec& spec,
                                      const Tolerances& tol);

}  // namespace hext
