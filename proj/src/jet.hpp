#pragma once

#include <cmath>

namespace phaseplane {

/// Second-order forward-mode dual number in the two variables (x, v).
/// Carries the value, the gradient and the upper triangle of the Hessian.
struct Jet {
  double val = 0.0;
  double dx = 0.0;
  double dv = 0.0;
  double dxx = 0.0;
  double dxv = 0.0;
  double dvv = 0.0;

  static Jet constant(double c) { return Jet{c}; }
  static Jet var_x(double x) { return Jet{x, 1.0}; }
  static Jet var_v(double v) { return Jet{v, 0.0, 1.0}; }
};

// Chain rule for a scalar function g with g(a.val) = g0, g' = g1, g'' = g2.
inline Jet chain(const Jet& a, double g0, double g1, double g2) {
  Jet r;
  r.val = g0;
  r.dx = g1 * a.dx;
  r.dv = g1 * a.dv;
  r.dxx = g2 * a.dx * a.dx + g1 * a.dxx;
  r.dxv = g2 * a.dx * a.dv + g1 * a.dxv;
  r.dvv = g2 * a.dv * a.dv + g1 * a.dvv;
  return r;
}

inline Jet operator-(const Jet& a) {
  return Jet{-a.val, -a.dx, -a.dv, -a.dxx, -a.dxv, -a.dvv};
}

inline Jet operator+(const Jet& a, const Jet& b) {
  return Jet{a.val + b.val, a.dx + b.dx,   a.dv + b.dv,
             a.dxx + b.dxx, a.dxv + b.dxv, a.dvv + b.dvv};
}

inline Jet operator-(const Jet& a, const Jet& b) {
  return Jet{a.val - b.val, a.dx - b.dx,   a.dv - b.dv,
             a.dxx - b.dxx, a.dxv - b.dxv, a.dvv - b.dvv};
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.val = a.val * b.val;
  r.dx = a.dx * b.val + a.val * b.dx;
  r.dv = a.dv * b.val + a.val * b.dv;
  r.dxx = a.dxx * b.val + 2.0 * a.dx * b.dx + a.val * b.dxx;
  r.dxv = a.dxv * b.val + a.dx * b.dv + a.dv * b.dx + a.val * b.dxv;
  r.dvv = a.dvv * b.val + 2.0 * a.dv * b.dv + a.val * b.dvv;
  return r;
}

}  // namespace phaseplane
