#include "hext/ext_engine.hpp"

#include <algorithm>
#include <cmath>

#include "hext/cantor.hpp"

namespace hext {

double SetFunction::operator()(const FiniteSet& k) const {
  if (!evaluate) throw std::logic_error("set function '" + name + "' has no evaluator");
  const double v = evaluate(k);
  if (std::isnan(v)) throw std::domain_error("set function '" + name + "' returned NaN");
  return v;
}

double ext_add(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && (a > 0) != (b > 0))
    throw std::domain_error("ext_add: +inf + -inf is undefined");
  return a + b;
}

double ext_mul(double a, double b) {
  if ((a == 0.0 && std::isinf(b)) || (b == 0.0 && std::isinf(a))) return 0.0;
  return a * b;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::converged: return "Converged";
    case Status::diverges_plus: return "DivergesPlus";
    case Status::diverges_minus: return "DivergesMinus";
    case Status::no_extension_evidence: return "NoExtensionEvidence";
    case Status::inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

void Tolerances::validate() const {
  if (!(tol_abs > 0.0)) throw std::invalid_argument("tolerances: tol_abs must be positive");
  if (window < 2) throw std::invalid_argument("tolerances: window must be at least 2");
  if (!(divergence_threshold > 0.0)) throw std::invalid_argument("tolerances: divergence threshold must be positive");
  if (!(separation > 0.0)) throw std::invalid_argument("tolerances: separation must be positive");
  if (min_level < 1 || max_level < min_level) throw std::invalid_argument("tolerances: bad level range");
  if (step < 1) throw std::invalid_argument("tolerances: step must be positive");
  if (!(ramp_min_step > 0.0)) throw std::invalid_argument("tolerances: ramp_min_step must be positive");
}

std::vector<int> Tolerances::levels() const {
  std::vector<int> out;
  if (schedule == Schedule::linear) {
    for (int l = min_level; l <= max_level; l += step) out.push_back(l);
  } else {
    for (long long l = min_level; l <= max_level; l *= 2) out.push_back(static_cast<int>(l));
  }
  return out;
}

namespace {

using Draw = std::function<Sample(int)>;
using Check = std::function<void(const FiniteSet&, int)>;

double window_mid(const std::vector<TraceRow>& rows, std::size_t w) {
  const std::size_t n = std::min(w, rows.size());
  double lo = rows.back().value;
  double hi = lo;
  for (std::size_t i = rows.size() - n; i < rows.size(); ++i) {
    lo = std::min(lo, rows[i].value);
    hi = std::max(hi, rows[i].value);
  }
  if (std::isinf(lo) || std::isinf(hi)) return rows.back().value;
  return lo + (hi - lo) / 2.0;
}

// Returns the terminal status for the trace so far, if any.
std::optional<Status> classify(const std::vector<TraceRow>& rows, const Tolerances& tol, double& value) {
  const auto w = static_cast<std::size_t>(tol.window);
  if (rows.size() < w) return std::nullopt;
  const auto first = rows.end() - static_cast<std::ptrdiff_t>(w);
  const auto [mn, mx] = std::minmax_element(first, rows.end(), [](const TraceRow& a, const TraceRow& b) {
    return a.value < b.value;
  });
  if (std::isfinite(mn->value) && std::isfinite(mx->value) && mx->value - mn->value <= tol.tol_abs) {
    value = mn->value + (mx->value - mn->value) / 2.0;
    return Status::converged;
  }
  if (mn->value > tol.divergence_threshold) return Status::diverges_plus;
  if (mx->value < -tol.divergence_threshold) return Status::diverges_minus;
  if (tol.schedule == Schedule::doubling) {
    bool up = true;
    bool down = true;
    for (auto it = first + 1; it != rows.end(); ++it) {
      const double d = it->value - (it - 1)->value;
      up = up && d >= tol.ramp_min_step;
      down = down && d <= -tol.ramp_min_step;
    }
    if (up) return Status::diverges_plus;
    if (down) return Status::diverges_minus;
  }
  return std::nullopt;
}

ExtensionEstimate run_rungs(const Tolerances& tol, const std::function<Rung(int)>& rung) {
  tol.validate();
  ExtensionEstimate est;
  est.tol = tol;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int level : tol.levels()) {
    Rung r;
    try {
      r = rung(level);
    } catch (const std::logic_error&) {
      throw;
    } catch (const std::exception& e) {
      throw LevelError(level, e.what());
    }
    if (std::isnan(r.value)) throw LevelError(level, "value is NaN");
    if (r.gap > prev_gap + kMetricTol)
      throw std::logic_error("sampler contract: gap bound increased at level " + std::to_string(level));
    prev_gap = r.gap;
    est.trace.push_back(TraceRow{level, r.gap, r.value, 0.0});
    est.trace.back().running = window_mid(est.trace, static_cast<std::size_t>(tol.window));
    est.last_set = std::move(r.points);
    double value = 0.0;
    if (auto st = classify(est.trace, tol, value)) {
      est.status = *st;
      if (*st == Status::converged) est.value = value;
      if (*st == Status::diverges_plus) est.value = std::numeric_limits<double>::infinity();
      if (*st == Status::diverges_minus) est.value = -std::numeric_limits<double>::infinity();
      return est;
    }
  }
  est.status = Status::inconclusive;
  if (!est.trace.empty()) est.value = est.trace.back().running;
  return est;
}

ExtensionEstimate run_ladder(const SetFunction& s, const Tolerances& tol, const Draw& draw, const Check& check) {
  return run_rungs(tol, [&](int level) {
    Sample sample = draw(level);
    if (check) check(sample.points, level);
    const double v = s(sample.points);
    return Rung{sample.gap.hi, v, std::move(sample.points)};
  });
}

void require_domain(const SetFunction& s, const SamplerSpec& spec) {
  if (s.domain == DomainClass::class_s && spec.strategy != Strategy::eds_bins && spec.strategy != Strategy::custom)
    throw std::invalid_argument("set function '" + s.name + "' needs an eds-bins sampler");
}

Check stretched_check(const SpaceDescriptor& space) {
  const bool cantor = std::holds_alternative<CantorTernary>(space.kind());
  return [&space, cantor](const FiniteSet& k, int level) {
    const bool ok = cantor ? exact_cantor_stretched(k) : is_stretched(k, space);
    if (!ok) throw std::logic_error("sampler emitted a non-stretched set at level " + std::to_string(level));
  };
}

}  // namespace

ExtensionEstimate estimate_ext(const SetFunction& s, const SpaceDescriptor& space, const SamplerSpec& spec,
                               const Tolerances& tol) {
  if (s.domain == DomainClass::stretched) return estimate_ext_stretched(s, space, spec, tol);
  require_domain(s, spec);
  return run_ladder(s, tol, [&](int level) { return refine(space, spec, level); }, {});
}

ExtensionEstimate estimate_ext_stretched(const SetFunction& s, const SpaceDescriptor& space,
                                         const SamplerSpec& spec, const Tolerances& tol) {
  require_domain(s, spec);
  return run_ladder(s, tol, [&](int level) { return refine(space, spec, level); }, stretched_check(space));
}

ExtensionEstimate cross_check(const SetFunction& s, const SpaceDescriptor& space, const SamplerSpec& first,
                              const SamplerSpec& second, const Tolerances& tol) {
  auto a = estimate_ext(s, space, first, tol);
  auto b = estimate_ext(s, space, second, tol);
  ExtensionEstimate out;
  out.tol = tol;
  out.trace = a.trace;
  out.second_trace = b.trace;
  out.last_set = a.last_set;
  auto witness = [&] {
    Witness w;
    w.first = a.last_set;
    w.second = b.last_set;
    if (!a.trace.empty()) {
      w.gap_first = a.trace.back().gap_hi;
      w.value_first = a.trace.back().value;
    }
    if (!b.trace.empty()) {
      w.gap_second = b.trace.back().gap_hi;
      w.value_second = b.trace.back().value;
    }
    w.sampler_first = first.name();
    w.sampler_second = second.name();
    return w;
  };
  const bool ca = a.status == Status::converged;
  const bool cb = b.status == Status::converged;
  const bool da = a.status == Status::diverges_plus || a.status == Status::diverges_minus;
  const bool db = b.status == Status::diverges_plus || b.status == Status::diverges_minus;
  if (ca && cb) {
    if (std::abs(a.value - b.value) <= tol.separation) {
      out.status = Status::converged;
      out.value = a.value + (b.value - a.value) / 2.0;
    } else {
      out.status = Status::no_extension_evidence;
      out.witness = witness();
    }
  } else if (da && db && a.status == b.status) {
    out.status = a.status;
    out.value = a.value;
  } else if ((ca || da) && (cb || db)) {
    out.status = Status::no_extension_evidence;
    out.witness = witness();
  } else {
    out.status = Status::inconclusive;
  }
  return out;
}

ExtensionEstimate estimate_limit(const std::function<Rung(int level)>& rung, const Tolerances& tol) {
  return run_rungs(tol, rung);
}

ExtensionEstimate estimate_ext_within(const SetFunction& s, const SpaceDescriptor& target,
                                      const SpaceDescriptor& outer, const SamplerSpec& spec,
                                      const Tolerances& tol) {
  require_domain(s, spec);
  return run_ladder(
      s, tol,
      [&](int level) {
        auto sample = refine(outer, spec, level);
        sample.gap = gap_to_subspace(sample.points, target);
        return sample;
      },
      {});
}

}  // namespace hext
