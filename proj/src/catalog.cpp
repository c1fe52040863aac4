#include "hext/catalog.hpp"

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace hext {

Formula parse_formula(const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  Formula out;
  const auto open = t.find('(');
  if (open == std::string::npos) {
    out.name = t;
  } else {
    if (t.back() != ')') throw std::invalid_argument("formula '" + text + "': missing ')'");
    out.name = boost::algorithm::trim_copy(t.substr(0, open));
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    if (!boost::algorithm::trim_copy(inner).empty()) {
      std::vector<std::string> parts;
      boost::algorithm::split(parts, inner, [](char c) { return c == ','; });
      for (auto& p : parts) {
        try {
          out.args.push_back(boost::lexical_cast<double>(boost::algorithm::trim_copy(p)));
        } catch (const boost::bad_lexical_cast&) {
          throw std::invalid_argument("formula '" + text + "': bad number '" + p + "'");
        }
      }
    }
  }
  if (out.name.empty()) throw std::invalid_argument("formula '" + text + "': missing name");
  return out;
}

namespace {

double arg(const Formula& f, std::size_t i, double fallback) { return i < f.args.size() ? f.args[i] : fallback; }

void arity(const Formula& f, std::size_t max_args) {
  if (f.args.size() > max_args)
    throw std::invalid_argument("formula '" + f.name + "' takes at most " + std::to_string(max_args) + " arguments");
}

[[noreturn]] void unknown(const std::string& catalog, const std::string& name) {
  std::string known;
  for (const auto& n : catalog_names(catalog)) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown " + catalog + " '" + name + "' (known: " + known + ")");
}

Sequence reciprocal_tail() {
  return [](std::int64_t r) { return 1.0 / static_cast<double>(r + 1); };
}
Sequence zero_tail() {
  return [](std::int64_t) { return 0.0; };
}

}  // namespace

SequenceEntry sequence_entry(const std::string& formula) {
  const auto f = parse_formula(formula);
  const auto& n = f.name;
  if (n == "geometric") {
    arity(f, 1);
    const double r = arg(f, 0, 0.5);
    if (!(std::abs(r) < 1.0)) throw std::invalid_argument("geometric ratio must satisfy |r| < 1");
    return {[r](std::int64_t i) { return std::pow(r, static_cast<double>(i)); }, {0.0},
            [r](std::int64_t k) { return std::pow(std::abs(r), static_cast<double>(k + 1)); }, formula};
  }
  if (n == "alternating_harmonic") {
    arity(f, 0);
    return {[](std::int64_t i) { return (i % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(i); }, {0.0},
            reciprocal_tail(), formula};
  }
  if (n == "harmonic") {
    arity(f, 0);
    return {[](std::int64_t i) { return 1.0 / static_cast<double>(i); }, {0.0}, reciprocal_tail(), formula};
  }
  if (n == "zero") {
    arity(f, 0);
    return {[](std::int64_t) { return 0.0; }, {0.0}, zero_tail(), formula};
  }
  if (n == "constant") {
    arity(f, 1);
    const double c = arg(f, 0, 1.0);
    return {[c](std::int64_t) { return c; }, {c}, zero_tail(), formula};
  }
  if (n == "shifted_reciprocal") {
    arity(f, 1);
    const double c = arg(f, 0, 0.0);
    return {[c](std::int64_t i) { return c + 1.0 / static_cast<double>(i); }, {c}, reciprocal_tail(), formula};
  }
  if (n == "parity") {  // 1 on odd indices, 0 on even ones
    arity(f, 0);
    return {[](std::int64_t i) { return i % 2 == 1 ? 1.0 : 0.0; }, {0.0, 1.0}, zero_tail(), formula};
  }
  if (n == "parity_decay") {
    arity(f, 0);
    return {[](std::int64_t i) { return (i % 2 == 1 ? 1.0 : 0.0) + 1.0 / static_cast<double>(i); }, {0.0, 1.0},
            reciprocal_tail(), formula};
  }
  if (n == "spike") {  // 1 at the first index, 0 elsewhere
    arity(f, 0);
    return {[](std::int64_t i) { return i == 1 ? 1.0 : 0.0; }, {0.0},
            [](std::int64_t r) { return r == 0 ? 1.0 : 0.0; }, formula};
  }
  if (n == "alternating_sign") {
    arity(f, 0);
    return {[](std::int64_t i) { return i % 2 == 0 ? 1.0 : -1.0; }, {-1.0, 1.0}, zero_tail(), formula};
  }
  unknown("sequence", n);
}

RealEntry real_entry(const std::string& formula) {
  const auto f = parse_formula(formula);
  const auto& n = f.name;
  auto increasing_sup = [](RealFn g) { return [g](double, double v) { return g(v); }; };
  if (n == "identity") {
    arity(f, 0);
    RealFn g = [](double x) { return x; };
    return {g, increasing_sup(g), g, formula};
  }
  if (n == "square") {
    arity(f, 0);
    RealFn g = [](double x) { return x * x; };
    // sup of x^2 over [u, v] sits at an endpoint
    return {g, [](double u, double v) { return std::max(u * u, v * v); },
            [](double y) { return y <= 0.0 ? 0.0 : std::sqrt(y); }, formula};
  }
  if (n == "power") {
    arity(f, 1);
    const double p = arg(f, 0, 2.0);
    if (!(p > 0.0)) throw std::invalid_argument("power exponent must be positive");
    RealFn g = [p](double x) { return std::pow(x, p); };
    return {g, increasing_sup(g), [p](double y) { return y <= 0.0 ? 0.0 : std::pow(y, 1.0 / p); }, formula};
  }
  if (n == "tent") {  // 0 at the ends of [0,1], 1 at 0.5
    arity(f, 0);
    RealFn g = [](double x) { return 1.0 - std::abs(2.0 * x - 1.0); };
    return {g, [g](double u, double v) { return g(std::clamp(0.5, u, v)); }, {}, formula};
  }
  if (n == "constant") {
    arity(f, 1);
    const double c = arg(f, 0, 1.0);
    return {[c](double) { return c; }, [c](double, double) { return c; }, {}, formula};
  }
  if (n == "indicator_half") {
    arity(f, 0);
    return {[](double x) { return x == 0.5 ? 1.0 : 0.0; },
            [](double u, double v) { return u <= 0.5 && 0.5 <= v ? 1.0 : 0.0; }, {}, formula};
  }
  if (n == "sine") {  // sin(pi x)
    arity(f, 0);
    RealFn g = [](double x) { return std::sin(std::numbers::pi * x); };
    return {g, {}, {}, formula};
  }
  if (n == "linear") {  // a*x + b
    arity(f, 2);
    const double a = arg(f, 0, 1.0);
    const double b = arg(f, 1, 0.0);
    RealFn g = [a, b](double x) { return a * x + b; };
    SupOracle sup = [g](double u, double v) { return std::max(g(u), g(v)); };
    RealFn inv;
    if (a > 0.0) inv = [a, b](double y) { return (y - b) / a; };
    return {g, sup, inv, formula};
  }
  unknown("function", n);
}

Curve curve_entry(const std::string& formula) {
  const auto f = parse_formula(formula);
  if (f.name == "quarter_circle") {
    arity(f, 1);
    const double r = arg(f, 0, 1.0);
    return [r](double t) {
      const double a = std::numbers::pi / 2.0 * t;
      return std::vector<double>{r * std::cos(a), r * std::sin(a)};
    };
  }
  if (f.name == "segment") {  // from the origin to (dx, dy)
    arity(f, 2);
    const double dx = arg(f, 0, 1.0);
    const double dy = arg(f, 1, 0.0);
    return [dx, dy](double t) { return std::vector<double>{dx * t, dy * t}; };
  }
  if (f.name == "parabola") {
    arity(f, 0);
    return [](double t) { return std::vector<double>{t, t * t}; };
  }
  unknown("curve", f.name);
}

MeasureEntry measure_entry(const std::string& formula) {
  const auto f = parse_formula(formula);
  const auto& n = f.name;
  if (n == "lebesgue_power") {  // f(x) = x^p on [0,1]
    arity(f, 1);
    const double p = arg(f, 0, 1.0);
    if (!(p > 0.0)) throw std::invalid_argument("lebesgue_power exponent must be positive");
    return {lebesgue_increasing(0.0, 1.0, [p](double y) { return y <= 0.0 ? 0.0 : std::pow(y, 1.0 / p); }, formula),
            LayerVariant::nonneg, 1.0};
  }
  if (n == "step_fixture") {  // f = 1 on [0,1] except f(1) = 2, a null set
    arity(f, 0);
    return {lebesgue_piecewise_constant({{1.0, 1.0}}, formula), LayerVariant::nonneg, 3.0};
  }
  if (n == "signed_identity") {  // f(x) = x on [-1,1]
    arity(f, 0);
    return {lebesgue_increasing(-1.0, 1.0, [](double y) { return y; }, formula), LayerVariant::signed_range, 1.0};
  }
  if (n == "neg_log") {
    arity(f, 0);
    return {neg_log_unit(), LayerVariant::halfline, 0.0};
  }
  if (n == "counting_geometric") {  // counting measure on {1,2,...}, f(n) = r^n
    arity(f, 1);
    const double r = arg(f, 0, 0.5);
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("counting_geometric ratio must lie in (0,1)");
    return {counting_decreasing([r](std::int64_t i) { return std::pow(r, static_cast<double>(i)); }, 1, formula),
            LayerVariant::halfline, 0.0};
  }
  if (n == "counting_harmonic") {
    arity(f, 0);
    return {counting_decreasing([](std::int64_t i) { return 1.0 / static_cast<double>(i); }, 1, formula),
            LayerVariant::halfline, 0.0};
  }
  unknown("measure", n);
}

IsoSetSpec iso_entry(const std::string& formula) {
  const auto f = parse_formula(formula);
  if (f.name == "harmonic_zero") {  // {1/n} with its limit 0
    arity(f, 0);
    return {{{[](std::int64_t n) { return 1.0 / static_cast<double>(n); }, 0.0}}, {0.0}, 2.0};
  }
  if (f.name == "two_sided") {  // {1/n} ∪ {1 - 1/n} ∪ {0, 1}
    arity(f, 0);
    return {{{[](std::int64_t n) { return 1.0 / static_cast<double>(n); }, 0.0},
             {[](std::int64_t n) { return 1.0 - 1.0 / static_cast<double>(n); }, 1.0}},
            {0.0, 1.0},
            2.0};
  }
  if (f.name == "finite") {
    if (f.args.empty()) throw std::invalid_argument("finite iso set needs at least one value");
    double m = 0.0;
    for (double x : f.args) m = std::max(m, std::abs(x));
    return {{}, f.args, m + 1.0};
  }
  unknown("iso set", f.name);
}

std::vector<std::string> catalog_names(const std::string& catalog) {
  static const std::map<std::string, std::vector<std::string>> names{
      {"sequence",
       {"geometric(r)", "alternating_harmonic", "harmonic", "zero", "constant(c)", "shifted_reciprocal(c)", "parity",
        "parity_decay", "spike", "alternating_sign"}},
      {"function", {"identity", "square", "power(p)", "tent", "constant(c)", "indicator_half", "sine", "linear(a,b)"}},
      {"curve", {"quarter_circle(r)", "segment(dx,dy)", "parabola"}},
      {"measure",
       {"lebesgue_power(p)", "step_fixture", "signed_identity", "neg_log", "counting_geometric(r)",
        "counting_harmonic"}},
      {"iso set", {"harmonic_zero", "two_sided", "finite(x1,...)"}},
  };
  const auto it = names.find(catalog);
  return it == names.end() ? std::vector<std::string>{} : it->second;
}

}  // namespace hext
