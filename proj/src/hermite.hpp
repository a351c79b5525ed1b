#pragma once

#include <array>

// Scalar Hermite interpolant of degree seven on one step, matching value and
// the first three derivatives at both ends. With exact derivatives at the
// accepted nodes its error is O(h^8), far below the step error of a fifth
// order pair, so interpolated values are as good as the nodes themselves.

namespace phaseplane::ode {

/// Value and first three derivatives with respect to t at one node.
struct Jet {
  double y = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

class SepticSegment {
 public:
  SepticSegment() = default;
  SepticSegment(double t0, double h, const Jet& a, const Jet& b)
      : t0(t0), h(h), y0_(a.y), y1_(b.y) {
    const double h2 = h * h;
    const double h3 = h2 * h;
    fwd_ = coefficients(b.y - a.y, h * a.d1, h2 * a.d2, h3 * a.d3, h * b.d1, h2 * b.d2, h3 * b.d3);
    // Same polynomial read from the far end, tau = 1 - theta.
    bwd_ = coefficients(a.y - b.y, -h * b.d1, h2 * b.d2, -h3 * b.d3, -h * a.d1, h2 * a.d2,
                        -h3 * a.d3);
  }

  double t0 = 0.0;
  double h = 0.0;

  double t1() const { return t0 + h; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }

  double at(double t) const {
    const double th = (t - t0) / h;
    return at_fraction(th, 1.0 - th);
  }

  /// Value at fraction th of the step; th1 = 1 - th is supplied by the caller.
  /// Points in the half nearer t1 are evaluated from that end so that they keep
  /// their relative precision.
  double at_fraction(double th, double th1) const {
    return th <= 0.5 ? y0_ + horner(fwd_, th) : y1_ + horner(bwd_, th1);
  }

  double derivative(double t) const {
    const double th = (t - t0) / h;
    double acc = 0.0;
    for (int k = 7; k >= 1; --k) acc = acc * th + k * fwd_[k];
    return acc / h;
  }

 private:
  using Poly = std::array<double, 8>;  // coefficient k multiplies theta^k; [0] unused

  // Degree-7 polynomial p with p(0) = 0, p(1) = dy and scaled derivatives
  // (e1, e2, e3) at 0 and (g1, g2, g3) at 1.
  static Poly coefficients(double dy, double e1, double e2, double e3, double g1, double g2,
                           double g3) {
    Poly c{};
    c[1] = e1;
    c[2] = e2 / 2.0;
    c[3] = e3 / 6.0;
    const double r0 = dy - (c[1] + c[2] + c[3]);
    const double r1 = g1 - (c[1] + 2.0 * c[2] + 3.0 * c[3]);
    const double r2 = g2 - (2.0 * c[2] + 6.0 * c[3]);
    const double r3 = g3 - 6.0 * c[3];
    c[4] = 35.0 * r0 - 15.0 * r1 + 2.5 * r2 - r3 / 6.0;
    c[5] = -84.0 * r0 + 39.0 * r1 - 7.0 * r2 + 0.5 * r3;
    c[6] = 70.0 * r0 - 34.0 * r1 + 6.5 * r2 - 0.5 * r3;
    c[7] = -20.0 * r0 + 10.0 * r1 - 2.0 * r2 + r3 / 6.0;
    return c;
  }

  static double horner(const Poly& c, double th) {
    double acc = 0.0;
    for (int k = 7; k >= 1; --k) acc = (acc + c[k]) * th;
    return acc;
  }

  double y0_ = 0.0;
  double y1_ = 0.0;
  Poly fwd_{};
  Poly bwd_{};
};

}  // namespace phaseplane::ode
