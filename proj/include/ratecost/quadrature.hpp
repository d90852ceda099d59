#pragma once

#include <cmath>
#include <cstddef>

#include "ratecost/errors.hpp"

namespace ratecost {

/// Composite Simpson rule on [a, b] with `points` nodes. Even counts are bumped
/// to the next odd count; fewer than three nodes become three.
template <class F>
double simpson(F&& f, double a, double b, int points) {
  if (points < 3) points = 3;
  if (points % 2 == 0) ++points;
  if (b == a) return 0.0;
  const int intervals = points - 1;
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

/// (1 - exp(-x)) / x, continuous at 0.
inline double one_minus_exp_ratio(double x) {
  if (std::abs(x) < 1e-10) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

}  // namespace ratecost
