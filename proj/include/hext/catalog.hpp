#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hext/set_functions.hpp"

namespace hext {

// Closed catalog of named builtins used by experiment configs. A formula string
// is a name with optional numeric arguments, e.g. "geometric(0.5)".

struct Formula {
  std::string name;
  std::vector<double> args;
};
/// Parses "name" or "name(a, b, ...)"; throws std::invalid_argument.
Formula parse_formula(const std::string& text);

struct SequenceEntry {
  Sequence a;
  std::vector<double> limits;  // accumulation values of the image
  Sequence tail_bound;         // tail_bound(R) >= sup_{i > R} dist(a(i), limits)
  std::string name;
};
SequenceEntry sequence_entry(const std::string& formula);

struct RealEntry {
  RealFn f;
  SupOracle sup;   // exact when known, else empty
  RealFn inverse;  // for increasing functions
  std::string name;
};
RealEntry real_entry(const std::string& formula);

Curve curve_entry(const std::string& formula);

struct MeasureEntry {
  MeasureOracle oracle;
  LayerVariant variant = LayerVariant::nonneg;
  double bound = 1.0;  // default M
};
MeasureEntry measure_entry(const std::string& formula);

IsoSetSpec iso_entry(const std::string& formula);

/// Names accepted by each catalog, for diagnostics and the README.
std::vector<std::string> catalog_names(const std::string& catalog);

}  // namespace hext
