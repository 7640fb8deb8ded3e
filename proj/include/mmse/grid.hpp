#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mmse {

// Uniform evaluation grid "lo:hi:steps" with both endpoints included.
struct Grid {
  long double lo = -2;
  long double hi = 2;
  int steps = 101;

  // Throws InvalidArgument unless lo < hi and steps >= 2.
  static Grid parse(std::string_view spec);
  static Grid make(long double lo, long double hi, int steps);

  std::vector<long double> points() const;
  std::string to_string() const;
};

}  // namespace mmse
