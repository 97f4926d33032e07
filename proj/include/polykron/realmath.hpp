#pragma once

#include <cmath>

namespace polykron {

// Fractional part in [0,1). floor() is exact, so for u in [0,2) this is the
// plain conditional-subtract recurrence; the guard handles u = -eps where
// u - floor(u) rounds up to 1.0.
inline double wrap_unit(double u) {
  double w = u - std::floor(u);
  return (w >= 1.0) ? 0.0 : w;
}

// Distance from b to the nearest integer (the || . || of one-dimensional
// Diophantine approximation).
inline double dist_to_int(double b) {
  return std::abs(b - std::nearbyint(b));
}

// Distance between a and b on the unit circle [0,1).
inline double circle_dist(double a, double b) {
  double d = std::abs(a - b);
  return d > 0.5 ? 1.0 - d : d;
}

}  // namespace polykron
