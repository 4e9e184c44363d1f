#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "raman/errors.hpp"

namespace raman::numerics {

namespace detail {

template <class F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of a smooth integrand on [a, b].
///
/// The absolute tolerance is `rel_tol` times a 33-point composite Simpson
/// estimate of the integral of |f|, so integrands that are tiny everywhere are
/// still resolved to relative accuracy. The interval is pre-split into 8
/// panels, which keeps peaked integrands from fooling the first comparison.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol = 1e-10,
                        int max_depth = 40) {
  if (a == b) return 0.0;
  constexpr int kCoarse = 32;
  const double hc = (b - a) / kCoarse;
  double scale = 0.0;
  for (int i = 0; i <= kCoarse; ++i) {
    const double w = (i == 0 || i == kCoarse) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    scale += w * std::abs(f(a + i * hc));
  }
  scale *= std::abs(hc) / 3.0;
  if (scale == 0.0) return 0.0;

  constexpr int kPanels = 8;
  const double tol = rel_tol * scale / kPanels;
  const double hp = (b - a) / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * hp;
    const double hi = (p + 1 == kPanels) ? b : a + (p + 1) * hp;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_recurse(f, lo, hi, flo, fmid, fhi, whole, tol, max_depth);
  }
  return total;
}

/// Bisection on a bracket [lo, hi] where f(lo) and f(hi) have opposite signs.
/// Stops when the bracket is narrower than `x_tol`.
template <class F>
double bisect(const F& f, double lo, double hi, double x_tol, int max_iter = 200) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericFailure("bisect: root not bracketed");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= x_tol || mid == lo || mid == hi) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  throw NumericFailure("bisect: no convergence within iteration cap");
}

/// One classical fourth-order Runge-Kutta step. `State` needs +, and scalar *.
template <class State, class Rhs>
State rk4_step(const Rhs& rhs, double t, const State& y, double h) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct SimplexResult {
  std::array<double, 2> point{};
  double value = 0.0;
  int iterations = 0;
};

/// Nelder-Mead minimisation in two dimensions (standard coefficients
/// 1, 2, 1/2, 1/2) started from `start` with initial edge `step`.
SimplexResult nelder_mead_2d(const std::function<double(const std::array<double, 2>&)>& f,
                             std::array<double, 2> start, double step, double f_tol = 1e-15,
                             double x_tol = 1e-10, int max_iter = 2000);

}  // namespace raman::numerics
