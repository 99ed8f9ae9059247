#pragma once

#include <cmath>

namespace thermo {

/// Half-open arc [lo, hi) of the circle R/Z, stored with 0 <= lo < hi <= 1.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
  [[nodiscard]] bool contains(double x) const { return lo <= x && x < hi; }
};

/// Reduce a real number to [0, 1).
inline double wrap(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// Distance on R/Z.
inline double circle_distance(double x, double y) {
  double d = std::fabs(wrap(x) - wrap(y));
  return d > 0.5 ? 1.0 - d : d;
}

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace thermo
