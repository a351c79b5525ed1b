#pragma once

#include "expr.hpp"

namespace phaseplane {

/// Right-hand side of the product form  x'' = f1(x) * f2(x').
class SeparableSystem {
 public:
  /// f1 may only mention x, f2 only v; throws Error(invalid_argument) otherwise.
  SeparableSystem(Expr f1, Expr f2);

  const Expr& f1() const { return f1_; }
  const Expr& f2() const { return f2_; }
  double f1_at(double x) const { return eval(f1_, x, 0.0); }
  double f2_at(double v) const { return eval(f2_, 0.0, v); }

 private:
  Expr f1_;
  Expr f2_;
};

/// Integral of s / f2(s) over [0, phi]. Throws Error(f2_zero) when f2
/// vanishes or changes sign on the interval.
double velocity_integral(const SeparableSystem& sys, double phi);

/// Signed integral of f1 from A to x.
double force_integral(const SeparableSystem& sys, double A, double x);

/// Same as force_integral(sys, A, A - offset) with the offset taken exactly,
/// which keeps full relative accuracy as x approaches A.
double force_integral_offset(const SeparableSystem& sys, double A, double offset);

/// Non-negative phi solving velocity_integral(phi) = force_integral(A, x).
/// Throws Error(out_of_range) when no real phi exists (x past a turning point).
double phi_separable(const SeparableSystem& sys, double A, double x);

/// phi_separable at x = A - offset, offset taken exactly.
double phi_separable_offset(const SeparableSystem& sys, double A, double offset);

}  // namespace phaseplane
