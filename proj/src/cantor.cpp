#include "hext/cantor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

namespace hext {

namespace {

__extension__ using Tick = __int128;
__extension__ using UTick = unsigned __int128;

// Points are integers over 2*3^60 so midpoints of two points stay integral.
constexpr int kDigits = 60;

constexpr Tick pow3(int k) {
  Tick r = 1;
  for (int i = 0; i < k; ++i) r *= 3;
  return r;
}

constexpr Tick kDenom = 2 * pow3(kDigits);

// unit[k] = kDenom / 3^k, the tick value of one unit in digit position k.
constexpr auto kUnit = [] {
  std::array<Tick, kDigits + 1> u{};
  for (int k = 0; k <= kDigits; ++k) u[static_cast<std::size_t>(k)] = kDenom / pow3(k);
  return u;
}();

constexpr std::int64_t kPrefixShift = 40;
constexpr std::int64_t kTailBit = std::int64_t{1} << 46;
constexpr std::int64_t kMarkerBit = std::int64_t{1} << 47;

boost::multiprecision::cpp_int to_big(Tick t) {
  const bool neg = t < 0;
  UTick u = neg ? static_cast<UTick>(-t) : static_cast<UTick>(t);
  boost::multiprecision::cpp_int hi = static_cast<std::uint64_t>(u >> 64);
  boost::multiprecision::cpp_int out = (hi << 64) + static_cast<std::uint64_t>(u);
  return neg ? -out : out;
}

Rational ticks_to_rational(Tick t) { return Rational(to_big(t), to_big(kDenom)); }

Tick ticks_of(const Point& p) {
  if (!is_cantor_labelled(p)) throw std::domain_error("cantor: point carries no digit label");
  const int len = static_cast<int>((p.label >> kPrefixShift) & 0x3F);
  Tick t = 0;
  for (auto bits = static_cast<std::uint64_t>(p.label) & ((std::uint64_t{1} << len) - 1); bits != 0;
       bits &= bits - 1)
    t += 2 * kUnit[static_cast<std::size_t>(std::countr_zero(bits) + 1)];
  if (p.label & kTailBit) t += kUnit[static_cast<std::size_t>(len)];  // 0.00..0222... = 3^-len
  return t;
}

std::vector<Tick> sorted_ticks(const FiniteSet& pts) {
  std::vector<Tick> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(ticks_of(p));
  std::sort(out.begin(), out.end());
  return out;
}

struct TickBracket {
  Tick floor;
  Tick ceil;
};

// Nearest Cantor points below and above m (equal when m lies in C).
TickBracket bracket(Tick m) {
  if (m <= 0) return {0, 0};
  if (m >= kDenom) return {kDenom, kDenom};
  Tick prefix = 0;
  Tick r = m;
  for (int k = 1; k <= kDigits; ++k) {
    Tick r3 = 3 * r;
    int digit = 0;
    while (r3 >= kDenom) {
      r3 -= kDenom;
      ++digit;
    }
    r = r3;
    const Tick unit = kUnit[static_cast<std::size_t>(k)];
    if (digit == 1) {
      if (r == 0) return {m, m};
      return {prefix + unit, prefix + 2 * unit};
    }
    prefix += digit * unit;
    if (r == 0) return {m, m};
  }
  throw std::logic_error("cantor: midpoint finer than the tick resolution");
}

// Digit bit i set means digit i+1 is 2.
Point make_point(std::uint64_t digit_bits, int len, int tail_digit) {
  static const auto inv3 = [] {
    std::array<double, kCantorMaxPrefix + 1> v{};
    v[0] = 1.0;
    for (std::size_t k = 1; k < v.size(); ++k) v[k] = v[k - 1] / 3.0;
    return v;
  }();
  std::int64_t label = kMarkerBit | (static_cast<std::int64_t>(len) << kPrefixShift) |
                       static_cast<std::int64_t>(digit_bits);
  double x = 0.0;
  for (auto bits = digit_bits; bits != 0; bits &= bits - 1)
    x += 2.0 * inv3[static_cast<std::size_t>(std::countr_zero(bits) + 1)];
  if (tail_digit == 2) {
    label |= kTailBit;
    x += inv3[static_cast<std::size_t>(len)];
  }
  return indexed(x, label);
}

// Reads `len` digits from the mask, most significant first, starting at
// digit position `offset` + 1.
std::uint64_t spread(std::uint64_t mask, int len, int offset) {
  std::uint64_t bits = 0;
  for (int i = 0; i < len; ++i)
    if ((mask >> (len - 1 - i)) & 1U) bits |= std::uint64_t{1} << (offset + i);
  return bits;
}

}  // namespace

Point cantor_point(std::span<const int> prefix, int tail_digit) {
  if (prefix.size() > static_cast<std::size_t>(kCantorMaxPrefix))
    throw std::domain_error("cantor_point: prefix too long");
  if (tail_digit != 0 && tail_digit != 2) throw std::domain_error("cantor_point: tail digit must be 0 or 2");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] == 2)
      bits |= std::uint64_t{1} << i;
    else if (prefix[i] != 0)
      throw std::domain_error("cantor_point: digits must be 0 or 2");
  }
  return make_point(bits, static_cast<int>(prefix.size()), tail_digit);
}

bool is_cantor_labelled(const Point& p) { return (p.label & kMarkerBit) != 0; }

Rational cantor_exact(const Point& p) { return ticks_to_rational(ticks_of(p)); }

CantorSamples cantor_samples(int n) {
  if (n < 2) throw std::domain_error("cantor_samples: n must be at least 2");
  if (n - 1 > kCantorMaxPrefix || n > 30) throw std::domain_error("cantor_samples: n too large");
  CantorSamples out;
  const int free_len = n - 1;
  // K_n: digits 1..n-1 free, digit n repeats.
  out.k.reserve(std::size_t{2} << free_len);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_len); ++mask) {
    const auto bits = spread(mask, free_len, 0);
    for (int tail : {0, 2}) out.k.push_back(make_point(bits, free_len, tail));
  }
  // L_{1,n}: first digit 0, (x_{n-1}, x_n) in {(2,0), (0,2)}.
  if (n == 2) {
    out.l1.push_back(make_point(0, 1, 2));
  } else {
    const int mid_len = n - 3;  // digits 2..n-2
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << mid_len); ++mask) {
      const auto bits = spread(mask, mid_len, 1);
      out.l1.push_back(make_point(bits | (std::uint64_t{1} << (n - 2)), n - 1, 0));
      out.l1.push_back(make_point(bits, n - 1, 2));
    }
  }
  // L_{2,n}: first digit 2, digits 2..n-1 free, digit n repeats.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 2)); ++mask) {
    const auto bits = spread(mask, n - 2, 1) | 1U;
    for (int tail : {0, 2}) out.l2.push_back(make_point(bits, n - 1, tail));
  }
  out.k = canonical(std::move(out.k));
  out.l1 = canonical(std::move(out.l1));
  out.l2 = canonical(std::move(out.l2));
  out.l = out.l1;
  out.l.insert(out.l.end(), out.l2.begin(), out.l2.end());
  out.l = canonical(std::move(out.l));
  return out;
}

Rational exact_mean(const FiniteSet& cantor_points) {
  if (cantor_points.empty()) throw std::domain_error("exact_mean: empty set");
  Tick sum = 0;
  for (const auto& p : cantor_points) sum += ticks_of(p);
  return Rational(to_big(sum), to_big(kDenom) * static_cast<unsigned long long>(cantor_points.size()));
}

Rational exact_cantor_gap(const FiniteSet& cantor_points) {
  if (cantor_points.empty()) return Rational(1);
  const auto t = sorted_ticks(cantor_points);
  Tick best = std::max<Tick>(t.front(), kDenom - t.back());
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const Tick a = t[i];
    const Tick b = t[i + 1];
    if (b == a) continue;
    const auto br = bracket((a + b) / 2);
    if (br.floor > a) best = std::max(best, std::min(br.floor - a, b - br.floor));
    if (br.ceil < b) best = std::max(best, std::min(br.ceil - a, b - br.ceil));
  }
  return ticks_to_rational(best);
}

Rational exact_min_pairwise(const FiniteSet& cantor_points) {
  if (cantor_points.size() < 2) throw std::domain_error("exact_min_pairwise: fewer than two points");
  const auto t = sorted_ticks(cantor_points);
  Tick best = kDenom;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) best = std::min(best, t[i + 1] - t[i]);
  return ticks_to_rational(best);
}

bool exact_cantor_stretched(const FiniteSet& cantor_points) {
  if (cantor_points.size() < 2) return true;
  return exact_min_pairwise(cantor_points) >= exact_cantor_gap(cantor_points);
}

}  // namespace hext
