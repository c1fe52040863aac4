#include "hext/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "hext/cantor.hpp"
#include "hext/catalog.hpp"
#include "hext/properties.hpp"
#include "hext/set_functions.hpp"

namespace hext {

namespace fs = std::filesystem;

// ---- config ---------------------------------------------------------------

std::string ExperimentConfig::text(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError(key, "required field is missing");
  return it->second;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ExperimentConfig::number(const std::string& key) const {
  const auto v = text(key);
  try {
    return boost::lexical_cast<double>(v);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long ExperimentConfig::integer(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const auto v = text(key);
  try {
    return boost::lexical_cast<long long>(v);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto v = text(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key, "expected yes/no, got '" + v + "'");
}

ExperimentConfig parse_config(std::istream& in, std::string source) {
  ExperimentConfig cfg;
  cfg.source = std::move(source);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    boost::algorithm::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(number);
    if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
    auto key = boost::algorithm::trim_copy(line.substr(0, eq));
    auto value = boost::algorithm::trim_copy(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where, "empty key");
    if (!cfg.values.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in, path.string());
}

// ---- output ---------------------------------------------------------------

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trace_csv(const std::vector<TraceRow>& rows, const std::string& final_status) {
  std::string out = "level,gap_hi,s_value,running_estimate,status\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(r.level) + ',' + format_real(r.gap_hi) + ',' + format_real(r.value) + ',' +
           format_real(r.running) + ',' + (i + 1 == rows.size() ? final_status : to_string(Status::inconclusive)) +
           '\n';
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string ExperimentResult::summary_line() const {
  std::ostringstream os;
  os << "RESULT " << status << ' ' << (value ? format_real(*value) : "-") << ' ' << levels << ' '
     << static_cast<long long>(std::llround(wall_ms));
  return os.str();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"series",  "unordered-sum", "unordered-mean", "riemann", "darboux",
                                              "arclength", "jordan",      "measure",        "iso-mean", "eds-mean",
                                              "cantor",  "sequence",      "properties"};
  return names;
}

// ---- builders -------------------------------------------------------------

namespace {

const std::set<std::string> kCommonKeys{
    "experiment", "seed",     "out",          "expect", "expect_value", "expect_tol", "tol_abs",
    "window",     "divergence_threshold", "separation", "min_level", "max_level", "step", "schedule",
    "ramp_min_step"};
const std::set<std::string> kSamplerKeys{"sampler",        "ppl",           "shift",           "parity",
                                         "eds_rule",       "tag_irrational", "cross_sampler",  "cross_parity",
                                         "cross_rule",     "cross_ppl",     "adversarial_prefix",
                                         "adversarial_extra", "adversarial_horizon"};
const std::set<std::string> kSpaceKeys{"space", "lo", "hi", "closed_lo", "closed_hi", "pieces", "extra",
                                       "first_exponent"};

struct Shape {
  std::set<std::string> keys;
  std::vector<std::string> required;
};

std::set<std::string> with(std::initializer_list<const std::set<std::string>*> groups,
                           std::initializer_list<std::string> extra) {
  std::set<std::string> out;
  for (const auto* g : groups) out.insert(g->begin(), g->end());
  out.insert(extra.begin(), extra.end());
  return out;
}

Shape shape_of(const std::string& experiment) {
  if (experiment == "series") return {with({&kSamplerKeys, &kSpaceKeys}, {"coeff"}), {"coeff"}};
  if (experiment == "unordered-sum") return {with({&kSamplerKeys}, {"coeff"}), {"coeff"}};
  if (experiment == "unordered-mean") return {with({&kSamplerKeys}, {"coeff", "mean", "oracle_cutoff"}), {"coeff"}};
  if (experiment == "riemann") return {with({&kSamplerKeys}, {"function", "lo", "hi"}), {"function"}};
  if (experiment == "darboux") return {with({&kSamplerKeys}, {"function", "lo", "hi", "sup"}), {"function"}};
  if (experiment == "arclength") return {with({&kSamplerKeys}, {"curve"}), {"curve"}};
  if (experiment == "jordan") return {with({&kSamplerKeys}, {"pieces"}), {"pieces"}};
  if (experiment == "measure") return {with({&kSamplerKeys}, {"measure", "bound", "variant"}), {"measure"}};
  if (experiment == "iso-mean") return {{"set"}, {"set"}};
  if (experiment == "eds-mean") return {with({&kSamplerKeys, &kSpaceKeys}, {}), {"space"}};
  if (experiment == "cantor") return {{"n_min", "n_max"}, {}};
  if (experiment == "sequence") return {with({&kSamplerKeys}, {"coeff"}), {"coeff"}};
  if (experiment == "properties")
    return {with({&kSpaceKeys},
                 {"predicate", "setfn", "function", "coeff", "measure", "curve", "bound", "trials", "base", "eps",
                  "n", "scales", "tol"}),
            {"predicate", "setfn", "space"}};
  throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.values.empty()) throw ConfigError("experiment", "empty config");
  const auto name = cfg.text("experiment");
  const auto shape = shape_of(name);
  for (const auto& [key, value] : cfg.values) {
    if (!kCommonKeys.count(key) && !shape.keys.count(key))
      throw ConfigError(key, "unknown field for experiment '" + name + "'");
    if (value.empty()) throw ConfigError(key, "empty value");
  }
  for (const auto& key : shape.required)
    if (!cfg.has(key)) throw ConfigError(key, "required field is missing");
  static const std::set<std::string> expectations{"any",           "converged",      "nonexistence",
                                                  "diverges_plus", "diverges_minus", "holds",
                                                  "counterexample"};
  if (!expectations.count(cfg.text("expect", "any")))
    throw ConfigError("expect", "unknown expectation '" + cfg.text("expect") + "'");
}

template <class F>
auto in_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

Tolerances tolerances(const ExperimentConfig& cfg) {
  Tolerances t;
  t.tol_abs = cfg.number("tol_abs", t.tol_abs);
  t.window = static_cast<int>(cfg.integer("window", t.window));
  t.divergence_threshold = cfg.number("divergence_threshold", t.divergence_threshold);
  t.separation = cfg.number("separation", t.separation);
  t.min_level = static_cast<int>(cfg.integer("min_level", t.min_level));
  t.max_level = static_cast<int>(cfg.integer("max_level", t.max_level));
  t.step = static_cast<int>(cfg.integer("step", t.step));
  t.ramp_min_step = cfg.number("ramp_min_step", t.ramp_min_step);
  const auto schedule = cfg.text("schedule", "linear");
  if (schedule == "linear")
    t.schedule = Schedule::linear;
  else if (schedule == "doubling")
    t.schedule = Schedule::doubling;
  else
    throw ConfigError("schedule", "expected linear or doubling");
  in_field("tol_abs", [&] {
    t.validate();
    return 0;
  });
  return t;
}

Strategy strategy_named(const std::string& field, const std::string& name) {
  static const std::map<std::string, Strategy> names{
      {"uniform_grid", Strategy::uniform_grid},   {"shifted_grid", Strategy::shifted_grid},
      {"prefix", Strategy::prefix},               {"stretched_dyadic", Strategy::stretched_dyadic},
      {"randomized_sdense", Strategy::randomized_sdense}, {"eds_bins", Strategy::eds_bins},
      {"cantor_k", Strategy::cantor_k},           {"cantor_l", Strategy::cantor_l},
      {"adversarial_tail", Strategy::adversarial_tail}, {"halfline_grid", Strategy::halfline_grid}};
  const auto it = names.find(name);
  if (it == names.end()) throw ConfigError(field, "unknown sampler '" + name + "'");
  return it->second;
}

PrefixParity parity_named(const std::string& field, const std::string& name) {
  if (name == "any") return PrefixParity::any;
  if (name == "even") return PrefixParity::even;
  if (name == "odd") return PrefixParity::odd;
  throw ConfigError(field, "expected any, even or odd");
}

EdsRule rule_named(const std::string& field, const std::string& name) {
  if (name == "midpoint") return EdsRule::midpoint;
  if (name == "infimum_side") return EdsRule::infimum_side;
  if (name == "random") return EdsRule::random;
  throw ConfigError(field, "expected midpoint, infimum_side or random");
}

std::uint64_t seed_of(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (opt.seed) return *opt.seed;
  const auto s = cfg.integer("seed", 0);
  if (s < 0) throw ConfigError("seed", "must be non-negative");
  return static_cast<std::uint64_t>(s);
}

SamplerSpec sampler_spec(const ExperimentConfig& cfg, const RunOptions& opt, Strategy fallback) {
  SamplerSpec s;
  s.strategy = cfg.has("sampler") ? strategy_named("sampler", cfg.text("sampler")) : fallback;
  s.seed = seed_of(cfg, opt);
  s.points_per_level = static_cast<int>(cfg.integer("ppl", 1));
  if (s.points_per_level < 1) throw ConfigError("ppl", "must be at least 1");
  s.shift = cfg.number("shift", s.shift);
  s.tag_irrational = cfg.flag("tag_irrational", false);
  s.parity = parity_named("parity", cfg.text("parity", "any"));
  s.eds_rule = rule_named("eds_rule", cfg.text("eds_rule", "midpoint"));
  s.adversarial.prefix_per_level = static_cast<int>(cfg.integer("adversarial_prefix", s.adversarial.prefix_per_level));
  s.adversarial.extra_per_level = static_cast<int>(cfg.integer("adversarial_extra", s.adversarial.extra_per_level));
  s.adversarial.horizon = cfg.integer("adversarial_horizon", s.adversarial.horizon);
  return s;
}

bool wants_cross(const ExperimentConfig& cfg) {
  return cfg.has("cross_sampler") || cfg.has("cross_parity") || cfg.has("cross_rule") || cfg.has("cross_ppl");
}

SamplerSpec cross_spec(const ExperimentConfig& cfg, SamplerSpec first) {
  if (cfg.has("cross_sampler")) first.strategy = strategy_named("cross_sampler", cfg.text("cross_sampler"));
  if (cfg.has("cross_parity")) first.parity = parity_named("cross_parity", cfg.text("cross_parity"));
  if (cfg.has("cross_rule")) first.eds_rule = rule_named("cross_rule", cfg.text("cross_rule"));
  if (cfg.has("cross_ppl")) first.points_per_level = static_cast<int>(cfg.integer("cross_ppl", 1));
  return first;
}

// Interval list such as "[0,1] (1,2]q"; suffix q = rationals, i = irrationals.
std::vector<Interval> parse_pieces(const std::string& field, const std::string& text) {
  std::vector<Interval> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      continue;
    }
    const char open = text[pos];
    const auto close_at = text.find_first_of("])", pos);
    if ((open != '[' && open != '(') || close_at == std::string::npos)
      throw ConfigError(field, "expected intervals like [0,1] or (1,2]q");
    const std::string body = text.substr(pos + 1, close_at - pos - 1);
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw ConfigError(field, "interval needs two endpoints");
    Interval iv;
    try {
      iv.lo = boost::lexical_cast<double>(boost::algorithm::trim_copy(body.substr(0, comma)));
      iv.hi = boost::lexical_cast<double>(boost::algorithm::trim_copy(body.substr(comma + 1)));
    } catch (const boost::bad_lexical_cast&) {
      throw ConfigError(field, "bad endpoint in '" + body + "'");
    }
    iv.closed_lo = open == '[';
    iv.closed_hi = text[close_at] == ']';
    pos = close_at + 1;
    if (pos < text.size() && (text[pos] == 'q' || text[pos] == 'i')) {
      iv.density = text[pos] == 'q' ? Density::rationals : Density::irrationals;
      ++pos;
    }
    out.push_back(iv);
  }
  if (out.empty()) throw ConfigError(field, "no intervals given");
  return out;
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, [](char c) { return c == ',' || c == ';'; });
  std::vector<double> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (p.empty()) continue;
    try {
      out.push_back(boost::lexical_cast<double>(p));
    } catch (const boost::bad_lexical_cast&) {
      throw ConfigError(field, "bad number '" + p + "'");
    }
  }
  return out;
}

SpaceDescriptor space_from(const ExperimentConfig& cfg) {
  const auto kind = cfg.text("space");
  return in_field("space", [&]() -> SpaceDescriptor {
    const double lo = cfg.number("lo", 0.0);
    const double hi = cfg.number("hi", 1.0);
    if (kind == "interval")
      return SpaceDescriptor::interval(lo, hi, cfg.flag("closed_lo", true), cfg.flag("closed_hi", true));
    if (kind == "rationals") return SpaceDescriptor::rationals(lo, hi);
    if (kind == "irrationals") return SpaceDescriptor::irrationals(lo, hi);
    if (kind == "harmonic")
      return SpaceDescriptor::harmonic(cfg.has("extra") ? parse_list("extra", cfg.text("extra")) : std::vector<double>{});
    if (kind == "dyadic") return SpaceDescriptor::dyadic(static_cast<int>(cfg.integer("first_exponent", 1)));
    if (kind == "cantor") return SpaceDescriptor::cantor();
    if (kind == "union") return SpaceDescriptor::union_of(parse_pieces("pieces", cfg.text("pieces")));
    if (kind == "halfline") return SpaceDescriptor::half_line();
    if (kind == "square")
      return SpaceDescriptor::product(SpaceDescriptor::interval(lo, hi), SpaceDescriptor::interval(lo, hi));
    throw ConfigError("space", "unknown space '" + kind + "'");
  });
}

// ---- experiments ----------------------------------------------------------

struct Outcome {
  std::string status;
  std::optional<double> value;
  std::vector<TraceRow> trace;
  std::vector<TraceRow> second;
  std::optional<Witness> witness;
  std::vector<std::string> notes;
};

Outcome from_estimate(ExtensionEstimate est) {
  Outcome o;
  o.status = to_string(est.status);
  if (est.status == Status::converged || est.status == Status::diverges_plus || est.status == Status::diverges_minus)
    o.value = est.value;
  o.trace = std::move(est.trace);
  o.second = std::move(est.second_trace);
  o.witness = std::move(est.witness);
  return o;
}

Outcome ladder(const ExperimentConfig& cfg, const RunOptions& opt, const SetFunction& s, const SpaceDescriptor& space,
               SamplerSpec spec) {
  const auto tol = tolerances(cfg);
  if (wants_cross(cfg)) return from_estimate(cross_check(s, space, spec, cross_spec(cfg, spec), tol));
  (void)opt;
  return from_estimate(estimate_ext(s, space, spec, tol));
}

SequenceEntry sequence_of(const ExperimentConfig& cfg) {
  return in_field("coeff", [&] { return sequence_entry(cfg.text("coeff")); });
}

RealEntry function_of(const ExperimentConfig& cfg) {
  return in_field("function", [&] { return real_entry(cfg.text("function")); });
}

Outcome run_series(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto seq = sequence_of(cfg);
  const auto kind = cfg.text("space", "harmonic");
  SeriesSpec spec{seq.a, "series(" + seq.name + ")"};
  if (kind == "harmonic") {
    auto sampler = sampler_spec(cfg, opt, Strategy::prefix);
    sampler.adversarial.a = seq.a;
    return ladder(cfg, opt, sf_series_harmonic(spec), SpaceDescriptor::harmonic(), sampler);
  }
  if (kind == "dyadic") {
    auto sampler = sampler_spec(cfg, opt, Strategy::stretched_dyadic);
    return ladder(cfg, opt, sf_series_dyadic(spec), SpaceDescriptor::dyadic(), sampler);
  }
  throw ConfigError("space", "series needs harmonic or dyadic");
}

Outcome run_unordered_sum(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto seq = sequence_of(cfg);
  auto problem = sf_unordered_sum(seq.a, seq.limits, seq.tail_bound);
  return ladder(cfg, opt, problem.s, problem.space, sampler_spec(cfg, opt, Strategy::prefix));
}

Outcome run_unordered_mean(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto seq = sequence_of(cfg);
  if (cfg.text("mean", "arithmetic") != "arithmetic") throw ConfigError("mean", "only 'arithmetic' is built in");
  const auto mean = arithmetic_mean();
  auto problem = sf_unordered_mean(seq.a, mean, seq.limits, seq.tail_bound);
  auto o = ladder(cfg, opt, problem.s, problem.space, sampler_spec(cfg, opt, Strategy::prefix));
  const auto regular = spot_check_regularity(mean, seed_of(cfg, opt));
  o.notes.push_back(std::string("mean regularity spot check: ") + (regular.regular() ? "passed" : "FAILED"));
  const auto verdict = unordered_average_oracle(seq.a, 1, cfg.integer("oracle_cutoff", 1'000'000));
  const char* kind = verdict.kind == AverageVerdict::Kind::exists       ? "exists"
                     : verdict.kind == AverageVerdict::Kind::not_exists ? "does not exist"
                                                                        : "unknown";
  o.notes.push_back(std::string("average oracle: ") + kind +
                    (verdict.kind == AverageVerdict::Kind::exists ? " (" + format_real(verdict.value) + ")" : "") +
                    ", " + verdict.reason);
  return o;
}

Outcome run_riemann(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto fn = function_of(cfg);
  const double lo = cfg.number("lo", 0.0);
  const double hi = cfg.number("hi", 1.0);
  auto s = in_field("lo", [&] { return sf_riemann(fn.f, lo, hi); });
  return ladder(cfg, opt, s, SpaceDescriptor::interval(lo, hi), sampler_spec(cfg, opt, Strategy::uniform_grid));
}

Outcome run_darboux(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto fn = function_of(cfg);
  const double lo = cfg.number("lo", 0.0);
  const double hi = cfg.number("hi", 1.0);
  const auto mode = cfg.text("sup", fn.sup ? "exact" : "probe");
  if (mode != "exact" && mode != "probe") throw ConfigError("sup", "expected exact or probe");
  if (mode == "exact" && !fn.sup) throw ConfigError("sup", "no exact supremum known for " + fn.name);
  auto sup = mode == "exact" ? fn.sup : probe_sup(fn.f, 64);
  auto s = in_field("lo", [&] { return sf_darboux_upper(fn.f, lo, hi, sup); });
  auto o = ladder(cfg, opt, s, SpaceDescriptor::interval(lo, hi), sampler_spec(cfg, opt, Strategy::uniform_grid));
  if (mode == "probe") o.notes.push_back("supremum probed on samples: upper sums may be optimistic");
  return o;
}

Outcome run_arclength(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto curve = in_field("curve", [&] { return curve_entry(cfg.text("curve")); });
  return ladder(cfg, opt, sf_polygon_length(curve), SpaceDescriptor::interval(0.0, 1.0),
                sampler_spec(cfg, opt, Strategy::uniform_grid));
}

Outcome run_jordan(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto space = in_field("pieces", [&] { return SpaceDescriptor::union_of(parse_pieces("pieces", cfg.text("pieces"))); });
  return ladder(cfg, opt, sf_inner_jordan(space), space, sampler_spec(cfg, opt, Strategy::uniform_grid));
}

Outcome run_measure(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto entry = in_field("measure", [&] { return measure_entry(cfg.text("measure")); });
  if (cfg.has("variant")) {
    const auto v = cfg.text("variant");
    if (v == "nonneg")
      entry.variant = LayerVariant::nonneg;
    else if (v == "signed")
      entry.variant = LayerVariant::signed_range;
    else if (v == "halfline")
      entry.variant = LayerVariant::halfline;
    else
      throw ConfigError("variant", "expected nonneg, signed or halfline");
  }
  const double bound = cfg.number("bound", entry.bound);
  auto s = in_field("bound", [&] { return sf_measure_integral(entry.oracle, bound, entry.variant); });
  switch (entry.variant) {
    case LayerVariant::nonneg:
      return ladder(cfg, opt, s, SpaceDescriptor::interval(0.0, bound, false, false),
                    sampler_spec(cfg, opt, Strategy::uniform_grid));
    case LayerVariant::signed_range:
      return ladder(cfg, opt, s,
                    SpaceDescriptor::union_of({Interval{-bound, 0.0, false, false}, Interval{0.0, bound, false, false}}),
                    sampler_spec(cfg, opt, Strategy::uniform_grid));
    case LayerVariant::halfline:
      return ladder(cfg, opt, s, SpaceDescriptor::half_line(), sampler_spec(cfg, opt, Strategy::halfline_grid));
  }
  throw std::logic_error("unhandled layer variant");
}

Outcome run_iso_mean(const ExperimentConfig& cfg, const RunOptions&) {
  const auto spec = in_field("set", [&] { return iso_entry(cfg.text("set")); });
  return from_estimate(mean_iso_limit(spec, tolerances(cfg)));
}

Outcome run_eds_mean(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto space = space_from(cfg);
  return ladder(cfg, opt, sf_mean_eds(), space, sampler_spec(cfg, opt, Strategy::eds_bins));
}

Outcome run_cantor(const ExperimentConfig& cfg, const RunOptions& opt) {
  const int n_min = static_cast<int>(cfg.integer("n_min", 2));
  const int n_max = static_cast<int>(cfg.integer("n_max", 20));
  if (n_min < 2) throw ConfigError("n_min", "must be at least 2");
  if (n_max < n_min || n_max > 30) throw ConfigError("n_max", "must lie in [n_min, 30]");
  std::vector<std::string> notes;
  const Rational half(1, 2);
  const Rational eleven_18(11, 18);
  for (int n = n_min; n <= n_max; ++n) {
    const auto samples = cantor_samples(n);
    const auto mk = exact_mean(samples.k);
    const auto ml = exact_mean(samples.l);
    if (mk != half) notes.push_back("n=" + std::to_string(n) + ": mean(K_n) = " + mk.str() + ", not 1/2");
    if (ml != eleven_18) notes.push_back("n=" + std::to_string(n) + ": mean(L_n) = " + ml.str() + ", not 11/18");
  }
  if (notes.empty()) notes.push_back("exact means: 1/2 and 11/18 at every n");
  Tolerances tol = tolerances(cfg);
  tol.min_level = n_min - 1;
  tol.max_level = n_max - 1;
  SamplerSpec k;
  k.strategy = Strategy::cantor_k;
  k.seed = seed_of(cfg, opt);
  SamplerSpec l = k;
  l.strategy = Strategy::cantor_l;
  auto o = from_estimate(cross_check(sf_finite_mean(), SpaceDescriptor::cantor(), k, l, tol));
  o.notes.insert(o.notes.begin(), notes.begin(), notes.end());
  return o;
}

Outcome run_sequence(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto seq = sequence_of(cfg);
  return ladder(cfg, opt, sf_sequence_limit(seq.a), SpaceDescriptor::harmonic(),
                sampler_spec(cfg, opt, Strategy::prefix));
}

SetFunction setfn_from(const ExperimentConfig& cfg, const SpaceDescriptor& space) {
  const auto f = in_field("setfn", [&] { return parse_formula(cfg.text("setfn")); });
  const auto& n = f.name;
  if (n == "midpoint") return sf_midpoint();
  if (n == "diameter") return sf_diameter(space);
  if (n == "finite_sum") return sf_finite_sum();
  if (n == "finite_mean") return sf_finite_mean();
  if (n == "constant") return sf_constant(f.args.empty() ? 1.0 : f.args[0]);
  if (n == "two_dense_indicator") return sf_two_dense_indicator();
  if (n == "rational_indicator")
    return sf_indicator_subset(SpaceDescriptor::rationals(cfg.number("lo", 0.0), cfg.number("hi", 1.0)));
  if (n == "inner_jordan") return in_field("space", [&] { return sf_inner_jordan(space); });
  if (n == "series") return sf_series_harmonic({sequence_of(cfg).a, "series"});
  if (n == "riemann") return sf_riemann(function_of(cfg).f, cfg.number("lo", 0.0), cfg.number("hi", 1.0));
  if (n == "darboux") {
    const auto fn = function_of(cfg);
    return sf_darboux_upper(fn.f, cfg.number("lo", 0.0), cfg.number("hi", 1.0), fn.sup);
  }
  if (n == "arclength") return sf_polygon_length(in_field("curve", [&] { return curve_entry(cfg.text("curve")); }));
  if (n == "layer") {
    const auto entry = in_field("measure", [&] { return measure_entry(cfg.text("measure")); });
    return sf_measure_integral(entry.oracle, cfg.number("bound", entry.bound), entry.variant);
  }
  throw ConfigError("setfn", "unknown set function '" + n + "'");
}

Outcome run_properties(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto space = space_from(cfg);
  const auto s = setfn_from(cfg, space);
  const auto predicate = cfg.text("predicate");
  const auto seed = seed_of(cfg, opt);
  const int trials = static_cast<int>(cfg.integer("trials", 50));
  if (trials < 1) throw ConfigError("trials", "must be positive");
  std::vector<FiniteSet> bases;
  if (cfg.has("base")) {
    FiniteSet b;
    for (double x : parse_list("base", cfg.text("base"))) b.push_back(at(x));
    bases.push_back(canonical(std::move(b)));
  }
  const auto scales = cfg.has("scales") ? parse_list("scales", cfg.text("scales")) : std::vector<double>{};
  const double tol = cfg.number("tol", 1e-6);
  const int n = static_cast<int>(cfg.integer("n", 3));
  PredicateReport report;
  if (predicate == "increasing" || predicate == "decreasing") {
    IncreasingParams p;
    p.decreasing = predicate == "decreasing";
    report = check_increasing(s, space, trials, seed, p);
  } else if (predicate == "d-increasing" || predicate == "d-decreasing") {
    DIncreasingParams p;
    p.decreasing = predicate == "d-decreasing";
    if (cfg.has("eps")) p.eps = parse_list("eps", cfg.text("eps"));
    p.bases = bases;
    p.l_per_delta = trials;
    report = check_d_increasing(s, space, p, seed);
  } else if (predicate == "d-continuous" || predicate == "continuous") {
    ContinuityParams p;
    p.n = n;
    p.tol = tol;
    p.bases = bases;
    p.mode = predicate == "continuous" ? ContinuityMode::any_size : ContinuityMode::fixed_size;
    if (!scales.empty()) p.scales = scales;
    report = check_d_continuous(s, space, p, trials, seed);
  } else if (predicate == "left-continuous" || predicate == "upward" || predicate == "weak-left") {
    LeftContinuityParams p;
    p.n = n;
    p.tol = tol;
    p.bases = bases;
    p.mode = predicate == "upward"      ? PerturbMode::upward
             : predicate == "weak-left" ? PerturbMode::upward_weak
                                        : PerturbMode::downward;
    if (!scales.empty()) p.scales = scales;
    report = check_left_continuous(s, space, p, trials, seed);
  } else if (predicate == "l-continuous") {
    LContinuityParams p;
    if (cfg.has("eps")) p.eps = parse_list("eps", cfg.text("eps")).at(0);
    const double lo = space.infimum();
    const double hi = space.supremum();
    report = check_l_continuous(s, SpaceDescriptor::rationals(lo, hi), space, p, trials, seed);
  } else {
    throw ConfigError("predicate", "unknown predicate '" + predicate + "'");
  }
  Outcome o;
  o.status = to_string(report.verdict);
  o.notes.push_back(report.predicate + ": " + std::to_string(report.trials) + " trials, " +
                    std::to_string(report.skipped) + " skipped");
  if (report.counterexample) {
    const auto& c = *report.counterexample;
    o.notes.push_back("counterexample: s(K) = " + format_real(c.value_k) + ", s(L) = " + format_real(c.value_l) +
                      ", trial seed " + std::to_string(c.trial_seed) + ", " + c.detail);
  }
  return o;
}

Outcome dispatch(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto name = cfg.text("experiment");
  if (name == "series") return run_series(cfg, opt);
  if (name == "unordered-sum") return run_unordered_sum(cfg, opt);
  if (name == "unordered-mean") return run_unordered_mean(cfg, opt);
  if (name == "riemann") return run_riemann(cfg, opt);
  if (name == "darboux") return run_darboux(cfg, opt);
  if (name == "arclength") return run_arclength(cfg, opt);
  if (name == "jordan") return run_jordan(cfg, opt);
  if (name == "measure") return run_measure(cfg, opt);
  if (name == "iso-mean") return run_iso_mean(cfg, opt);
  if (name == "eds-mean") return run_eds_mean(cfg, opt);
  if (name == "cantor") return run_cantor(cfg, opt);
  if (name == "sequence") return run_sequence(cfg, opt);
  if (name == "properties") return run_properties(cfg, opt);
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

std::string expectation_of(const std::string& status) {
  if (status == to_string(Status::converged)) return "converged";
  if (status == to_string(Status::no_extension_evidence)) return "nonexistence";
  if (status == to_string(Status::diverges_plus)) return "diverges_plus";
  if (status == to_string(Status::diverges_minus)) return "diverges_minus";
  if (status == to_string(Verdict::holds_on_samples)) return "holds";
  if (status == to_string(Verdict::counterexample)) return "counterexample";
  return "";
}

fs::path default_csv(const ExperimentConfig& cfg) {
  if (cfg.has("out")) return cfg.text("out");
  fs::path src(cfg.source);
  return src.has_stem() && cfg.source != "<memory>" ? fs::path(src.stem().string() + ".csv") : fs::path("trace.csv");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentResult r;
  r.status = "Error";
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    validate(config);
    // Everything the run needs is parsed up front so bad fields fail before any work.
    if (config.text("experiment") != "iso-mean" && config.text("experiment") != "properties" &&
        config.text("experiment") != "cantor")
      (void)tolerances(config);
    (void)seed_of(config, options);
    const auto expect = config.text("expect", "any");
    const double expect_value = config.number("expect_value", std::nan(""));
    const double expect_tol = config.number("expect_tol", 1e-6);

    auto outcome = dispatch(config, options);
    r.status = outcome.status;
    r.value = outcome.value;
    r.levels = static_cast<int>(outcome.trace.size());
    r.witness = outcome.witness;
    r.csv_path = options.out ? *options.out : default_csv(config);
    write_file_atomic(r.csv_path, trace_csv(outcome.trace, outcome.status));
    if (!outcome.second.empty()) {
      auto second = r.csv_path;
      second.replace_extension(".cross.csv");
      write_file_atomic(second, trace_csv(outcome.second, outcome.status));
    }
    std::vector<std::string> lines = outcome.notes;
    const auto got = expectation_of(outcome.status);
    if (got.empty()) {
      r.exit_code = 2;
    } else if (expect == "any") {
      r.exit_code = got == "nonexistence" || got == "counterexample" ? 1 : 0;
      if (r.exit_code) lines.push_back("unexpected " + got + " (set expect = " + got + " if intended)");
    } else if (expect != got) {
      r.exit_code = 1;
      lines.push_back("expected " + expect + ", got " + got);
    } else {
      r.exit_code = 0;
    }
    if (r.exit_code == 0 && !std::isnan(expect_value)) {
      if (!r.value || !(std::abs(*r.value - expect_value) <= expect_tol)) {
        r.exit_code = 1;
        lines.push_back("value " + (r.value ? format_real(*r.value) : std::string("-")) + " is not within " +
                        format_real(expect_tol) + " of " + format_real(expect_value));
      }
    }
    for (const auto& l : lines) r.message += l + '\n';
  } catch (const ConfigError& e) {
    r.status = "Error";
    r.exit_code = 1;
    r.message = config.source + ": invalid config: " + e.what() + '\n';
  } catch (const std::exception& e) {
    r.status = "Error";
    r.exit_code = 1;
    r.message = config.source + ": " + e.what() + '\n';
  }
  r.wall_ms = elapsed();
  return r;
}

std::string SuiteReport::table() const {
  std::string out = "config,status,value,levels,exit_code\n";
  for (const auto& m : members)
    out += m.config + ',' + m.result.status + ',' + (m.result.value ? format_real(*m.result.value) : "-") + ',' +
           std::to_string(m.result.levels) + ',' + std::to_string(m.result.exit_code) + '\n';
  return out;
}

SuiteReport run_suite(const fs::path& dir, const fs::path& out_dir, int jobs, const RunOptions& options) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  SuiteReport report;
  report.members.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      auto& member = report.members[i];
      member.config = configs[i].filename().string();
      RunOptions opt = options;
      opt.out = out_dir / (configs[i].stem().string() + ".csv");
      try {
        member.result = run_experiment(load_config(configs[i]), opt);
      } catch (const std::exception& e) {
        member.result.status = "Error";
        member.result.exit_code = 1;
        member.result.message = configs[i].string() + ": " + e.what() + '\n';
      }
    }
  };
  const int workers = std::clamp(jobs, 1, std::max(1, static_cast<int>(configs.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& m : report.members)
    if (m.result.exit_code != 0) report.exit_code = 1;
  write_file_atomic(out_dir / "suite_summary.csv", report.table());
  return report;
}

}  // namespace hext
