#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "geoeq/errors.hpp"

namespace geoeq::numerics {

struct RootResult {
  double x;
  double fx;
  int iterations;
};

/// Bracketed root of `f` on [lo, hi] given the endpoint values. TOMS 748
/// (bisection safeguarded inverse-cubic interpolation), run until the bracket
/// is a few ulps wide; returns whichever end has the smaller |f|.
template <typename F>
RootResult bracketed_root(F&& f, double lo, double hi, double f_lo, double f_hi,
                          int max_iterations = 200) {
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw SolverError("root not bracketed on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iterations);
  boost::math::tools::eps_tolerance<double> tol(52);
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
  if (iters >= static_cast<std::uintmax_t>(max_iterations)) {
    throw SolverError("root finder exhausted " + std::to_string(max_iterations) +
                      " iterations");
  }
  const double fa = f(a);
  const double fb = f(b);
  if (std::abs(fa) <= std::abs(fb)) return {a, fa, static_cast<int>(iters)};
  return {b, fb, static_cast<int>(iters)};
}

/// Fourth-order central first derivative.
template <typename F>
double central_first(F&& f, double x, double step) {
  const double fp1 = f(x + step);
  const double fm1 = f(x - step);
  const double fp2 = f(x + 2.0 * step);
  const double fm2 = f(x - 2.0 * step);
  return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * step);
}

/// Second-order one-sided first derivative; `step` may be negative.
template <typename F>
double one_sided_first(F&& f, double x, double step) {
  return (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step);
}

/// Five-point central third derivative, O(step^2).
template <typename F>
double central_third(F&& f, double x, double step) {
  return (f(x + 2.0 * step) - 2.0 * f(x + step) + 2.0 * f(x - step) -
          f(x - 2.0 * step)) /
         (2.0 * step * step * step);
}

/// Central third derivative with one Richardson extrapolation (step, step/2).
template <typename F>
double richardson_third(F&& f, double x, double step) {
  const double coarse = central_third(f, x, step);
  const double fine = central_third(f, x, 0.5 * step);
  return (4.0 * fine - coarse) / 3.0;
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace geoeq::numerics
