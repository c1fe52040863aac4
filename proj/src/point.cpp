#include "hext/point.hpp"

#include <algorithm>
#include <tuple>

namespace hext {

bool point_less(const Point& a, const Point& b) {
  return std::tie(a.x, a.y, a.label, a.irrational) < std::tie(b.x, b.y, b.label, b.irrational);
}

FiniteSet canonical(FiniteSet set) {
  if (!std::is_sorted(set.begin(), set.end(), point_less)) std::sort(set.begin(), set.end(), point_less);
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

FiniteSet make_set(std::initializer_list<double> xs) {
  FiniteSet out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(at(x));
  return canonical(std::move(out));
}

std::vector<double> coordinates(const FiniteSet& set) {
  std::vector<double> xs;
  xs.reserve(set.size());
  for (const auto& p : set) xs.push_back(p.x);
  return xs;
}

}  // namespace hext
