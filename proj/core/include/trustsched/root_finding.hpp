#pragma once

#include <cmath>
#include <stdexcept>

namespace trustsched {

/// Bisection on [lo, hi] for a continuous f with f(lo) and f(hi) of opposite
/// sign (or one of them zero). Stops when the bracket is narrower than `tol`
/// and returns its midpoint.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw std::invalid_argument("bisect: root is not bracketed");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace trustsched
