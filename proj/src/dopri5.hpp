#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with the standard
// fourth-order continuous extension (Hairer, Norsett & Wanner, "Solving
// Ordinary Differential Equations I", DOPRI5 dense output).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "errors.hpp"

namespace phaseplane::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Interpolant over one accepted step [t0, t0 + h].
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> r{};

  double t1() const { return t0 + h; }
  const Vec<N>& y0() const { return r[0]; }

  Vec<N> at(double t) const {
    const double th = (t - t0) / h;
    return at_fraction(th, 1.0 - th);
  }

  /// Interpolant at fraction th of the step, with th1 = 1 - th supplied by the
  /// caller so that points close to t1 keep their relative precision.
  Vec<N> at_fraction(double th, double th1) const {
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    }
    return y;
  }

  /// Time derivative of the interpolant.
  Vec<N> derivative(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    Vec<N> dy;
    for (std::size_t i = 0; i < N; ++i) {
      const double R = r[3][i] + th1 * r[4][i];
      const double Q = r[2][i] + th * R;
      const double P = r[1][i] + th1 * Q;
      const double dQ = R - th * r[4][i];
      const double dP = -Q + th1 * dQ;
      dy[i] = (P + th * dP) / h;
    }
    return dy;
  }

  Vec<N> y1() const {
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = r[0][i] + r[1][i];
    return y;
  }
};

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 selects a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 1'000'000;
  double safety = 0.9;
  double grow = 5.0;
  double shrink = 0.1;
};

namespace detail {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
double scaled_norm(const Vec<N>& v, const Vec<N>& y0, const Vec<N>& y1, const StepControl& c) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = c.atol + c.rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double q = v[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(N));
}

template <std::size_t N, typename Rhs>
double initial_step(Rhs& rhs, double t0, const Vec<N>& y0, const Vec<N>& f0, double span,
                    const StepControl& c) {
  const double d0 = scaled_norm<N>(y0, y0, y0, c);
  const double d1 = scaled_norm<N>(f0, y0, y0, c);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  Vec<N> y1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
  const Vec<N> f1 = rhs(t0 + h0, y1);
  Vec<N> df;
  for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - f0[i];
  const double d2 = scaled_norm<N>(df, y0, y0, c) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, span, c.h_max});
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t_end (t_end > t0).
///
/// `on_step(const DenseSegment<N>&)` is called after every accepted step and
/// returns false to stop early. Throws Error(step_underflow) when the step
/// size collapses and Error(guard_tripped) when max_steps is exceeded.
template <std::size_t N, typename Rhs, typename OnStep>
void integrate(Rhs&& rhs, double t0, const Vec<N>& y_start, double t_end,
               const StepControl& control, OnStep&& on_step) {
  using namespace detail;
  double t = t0;
  Vec<N> y = y_start;
  Vec<N> k1 = rhs(t, y);
  double h = control.h_init > 0.0
                 ? std::min({control.h_init, t_end - t0, control.h_max})
                 : initial_step<N>(rhs, t, y, k1, t_end - t0, control);
  bool last_rejected = false;
  std::size_t accepted = 0;
  Vec<N> tmp, k2, k3, k4, k5, k6, k7, y1, err;

  while (t < t_end) {
    if (accepted >= control.max_steps) {
      throw Error(ErrorCode::guard_tripped,
                  "step-count guard tripped after " + std::to_string(accepted) + " steps");
    }
    const double min_step = 16.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::fabs(t), std::numeric_limits<double>::min());
    if (h < min_step) {
      throw Error(ErrorCode::step_underflow,
                  "step size underflow at t = " + std::to_string(t));
    }
    bool final_step = false;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(t + h, y1);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    double en = scaled_norm<N>(err, y, y1, control);
    if (!std::isfinite(en)) en = 1e10;

    if (en <= 1.0) {
      DenseSegment<N> seg;
      seg.t0 = t;
      seg.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.r[0][i] = y[i];
        seg.r[1][i] = ydiff;
        seg.r[2][i] = bspl;
        seg.r[3][i] = ydiff - h * k7[i] - bspl;
        seg.r[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      ++accepted;
      t = final_step ? t_end : t + h;
      y = y1;
      k1 = k7;
      if (!on_step(static_cast<const DenseSegment<N>&>(seg))) return;

      double fac = en == 0.0 ? control.grow : control.safety * std::pow(en, -0.2);
      fac = std::clamp(fac, control.shrink, control.grow);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, control.h_max);
      last_rejected = false;
    } else {
      const double fac = std::max(control.shrink, control.safety * std::pow(en, -0.2));
      h *= fac;
      last_rejected = true;
    }
  }
}

}  // namespace phaseplane::ode
