#include "mmse/grid.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "mmse/errors.hpp"

namespace mmse {

namespace {

long double parse_real(std::string_view field, std::string_view spec) {
  const std::string s(field);
  std::size_t used = 0;
  long double v = 0;
  try {
    v = std::stold(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v))
    throw InvalidArgument(fmt::format("grid '{}': '{}' is not a number", spec, field));
  return v;
}

}  // namespace

Grid Grid::make(long double lo, long double hi, int steps) {
  if (!(lo < hi)) throw InvalidArgument("grid needs lo < hi");
  if (steps < 2) throw InvalidArgument("grid needs at least 2 steps");
  return Grid{lo, hi, steps};
}

Grid Grid::parse(std::string_view spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string_view::npos ? a : spec.find(':', a + 1);
  if (b == std::string_view::npos || spec.find(':', b + 1) != std::string_view::npos)
    throw InvalidArgument(fmt::format("grid '{}' must look like lo:hi:steps", spec));
  const long double lo = parse_real(spec.substr(0, a), spec);
  const long double hi = parse_real(spec.substr(a + 1, b - a - 1), spec);
  const std::string_view st = spec.substr(b + 1);
  int steps = 0;
  auto [ptr, ec] = std::from_chars(st.data(), st.data() + st.size(), steps);
  if (ec != std::errc() || ptr != st.data() + st.size())
    throw InvalidArgument(fmt::format("grid '{}': steps '{}' is not an integer", spec, st));
  return make(lo, hi, steps);
}

std::vector<long double> Grid::points() const {
  std::vector<long double> out(steps);
  for (int i = 0; i < steps; ++i) out[i] = lo + (hi - lo) * i / (steps - 1);
  out.back() = hi;
  return out;
}

std::string Grid::to_string() const {
  return fmt::format("{}:{}:{}", static_cast<double>(lo), static_cast<double>(hi), steps);
}

}  // namespace mmse
