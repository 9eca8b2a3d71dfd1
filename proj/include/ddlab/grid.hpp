#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ddlab {

// Log-spaced iteration grid, `per_decade` points per factor of ten, rounded
// to integers and deduplicated. Risk curves live on log-t axes, so this is
// the default sampling for every experiment.
inline std::vector<long> log_grid(long t_max, int per_decade = 40,
                                  bool include_zero = false) {
  std::vector<long> pts;
  if (include_zero) pts.push_back(0);
  if (t_max < 1) return pts;
  long prev = 0;
  for (int j = 0;; ++j) {
    const double x = std::pow(10.0, static_cast<double>(j) / per_decade);
    const long t = std::llround(x);
    if (t > t_max) break;
    if (t != prev) pts.push_back(t);
    prev = t;
  }
  if (pts.empty() || pts.back() != t_max) pts.push_back(t_max);
  return pts;
}

}  // namespace ddlab
