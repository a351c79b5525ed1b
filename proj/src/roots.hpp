#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "errors.hpp"

namespace phaseplane {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  std::size_t evaluations = 0;
};

struct RootTolerance {
  double x_abs = 0.0;    // stop when the bracket is narrower than x_abs + x_rel * |x|
  double x_rel = 0.0;
  double f_abs = 0.0;    // stop when |f(x)| <= f_abs
  std::size_t max_evaluations = 200;
};

/// Bracketing root finder: bisection safeguarding secant and inverse quadratic
/// steps (Brent's zeroin). `fa`, `fb` are f(a), f(b) and must differ in sign.
template <typename F>
RootResult find_root(F&& f, double a, double b, double fa, double fb, const RootTolerance& tol) {
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorCode::no_sign_change, "root bracket does not change sign");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  std::size_t evaluations = 0;
  constexpr double eps = 2.220446049250313e-16;

  for (;;) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double x_tol = 2.0 * eps * std::fabs(b) + 0.5 * (tol.x_abs + tol.x_rel * std::fabs(b));
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= x_tol || std::fabs(fb) <= tol.f_abs || fb == 0.0) {
      return {b, fb, evaluations};
    }
    if (evaluations >= tol.max_evaluations) {
      throw Error(ErrorCode::non_convergence, "root finder exceeded its evaluation budget");
    }
    if (std::fabs(e) < x_tol || std::fabs(fa) <= std::fabs(fb)) {
      d = e = m;
    } else {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::fmin(3.0 * m * q - std::fabs(x_tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > x_tol ? d : (m > 0.0 ? x_tol : -x_tol);
    fb = f(b);
    ++evaluations;
  }
}

}  // namespace phaseplane
