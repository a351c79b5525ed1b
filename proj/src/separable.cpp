#include "separable.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace phaseplane {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 15;
constexpr int kSignSamples = 64;
constexpr double kMaxPhi = 1e8;
constexpr int kMaxNewton = 200;
constexpr double kPhiRel = 1e-14;
constexpr double kCancel = 1e-13;

// int_0^1 f. Callers scale their integrals onto the unit interval so the
// integrand stays O(1): the error floor of the adaptive rule is absolute and
// would otherwise force full-depth subdivision on tiny intervals.
template <typename F>
double integrate_unit(F&& f, double* l1 = nullptr) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, kQuadDepth,
                                                                       kQuadTol, &error, l1);
}

// F with the integral of |f1| alongside, which sizes its rounding error.
double force_integral_scaled(const SeparableSystem& sys, double A, double offset, double* l1) {
  *l1 = 0.0;
  if (offset == 0.0) return 0.0;
  const double value =
      -offset * integrate_unit([&sys, A, offset](double w) { return sys.f1_at(A - offset * w); }, l1);
  *l1 *= std::fabs(offset);
  return value;
}

// G(phi) = phi^2 int_0^1 w / f2(phi w) dw; the sign scan is the caller's job.
double velocity_integral_unchecked(const SeparableSystem& sys, double phi) {
  if (phi == 0.0) return 0.0;
  return phi * phi * integrate_unit([&sys, phi](double w) { return w / sys.f2_at(phi * w); });
}

// f2 at 0 fixes the sign; every sample on [0, phi] must share it.
void check_f2_one_signed(const SeparableSystem& sys, double phi) {
  const double f0 = sys.f2_at(0.0);
  if (f0 == 0.0) throw Error(ErrorCode::f2_zero, "f2 vanishes at v = 0");
  for (int i = 1; i <= kSignSamples; ++i) {
    const double s = phi * static_cast<double>(i) / kSignSamples;
    const double fs = sys.f2_at(s);
    if (fs == 0.0 || (fs > 0.0) != (f0 > 0.0)) {
      throw Error(ErrorCode::f2_zero,
                  "f2 changes sign or vanishes near v = " + std::to_string(s));
    }
  }
}

}  // namespace

SeparableSystem::SeparableSystem(Expr f1, Expr f2) : f1_(std::move(f1)), f2_(std::move(f2)) {
  if (f1_.uses(Variable::v)) {
    throw Error(ErrorCode::invalid_argument, "f1 must depend on x only");
  }
  if (f2_.uses(Variable::x)) {
    throw Error(ErrorCode::invalid_argument, "f2 must depend on v only");
  }
}

double velocity_integral(const SeparableSystem& sys, double phi) {
  if (phi == 0.0) return 0.0;
  check_f2_one_signed(sys, phi);
  return velocity_integral_unchecked(sys, phi);
}

double force_integral(const SeparableSystem& sys, double A, double x) {
  return force_integral_offset(sys, A, A - x);
}

double force_integral_offset(const SeparableSystem& sys, double A, double offset) {
  // F(A, A - t) = -int_0^t f1(A - r) dr = -t int_0^1 f1(A - t w) dw
  double l1 = 0.0;
  return force_integral_scaled(sys, A, offset, &l1);
}

double phi_separable(const SeparableSystem& sys, double A, double x) {
  if (x == A) return 0.0;
  return phi_separable_offset(sys, A, A - x);
}

double phi_separable_offset(const SeparableSystem& sys, double A, double offset) {
  if (offset == 0.0) return 0.0;
  double l1 = 0.0;
  const double target = force_integral_scaled(sys, A, offset, &l1);
  if (target == 0.0) return 0.0;
  const double f2_0 = sys.f2_at(0.0);
  if (f2_0 == 0.0) throw Error(ErrorCode::f2_zero, "f2 vanishes at v = 0");
  // For phi > 0 the velocity integral carries the sign of f2.
  const double sign = f2_0 > 0.0 ? 1.0 : -1.0;
  if (target * sign < 0.0) {
    // At the opposite turning point F cancels to rounding level.
    if (std::fabs(target) <= kCancel * l1) return 0.0;
    throw Error(ErrorCode::out_of_range,
                "no real phi at x = " + std::to_string(A - offset) +
                    " (point lies beyond a turning point)");
  }
  const auto G = [&sys](double phi) { return velocity_integral_unchecked(sys, phi); };

  // Newton on G(phi) = target with G'(phi) = phi / f2(phi), kept inside a
  // bracket that starts as [0, inf) and falls back to bisection.
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double checked = 0.0;  // f2 is known to keep its sign on [0, checked]
  // Small-phi estimate: G(phi) ~ phi^2 / (2 f2(0)).
  double phi = std::sqrt(2.0 * std::fabs(target * f2_0));
  for (int iter = 0; iter < kMaxNewton; ++iter) {
    if (phi > checked) {
      check_f2_one_signed(sys, phi);
      checked = phi;
    }
    const double r = G(phi) - target;
    if (r == 0.0) return phi;
    if (r * sign < 0.0) {
      lo = phi;
    } else {
      hi = phi;
    }
    double next = phi - r / (phi / sys.f2_at(phi));
    if (!(next > lo && next < hi)) next = std::isinf(hi) ? 2.0 * phi : 0.5 * (lo + hi);
    if (next > kMaxPhi) {
      throw Error(ErrorCode::out_of_range,
                  "force integral lies outside the range of the velocity integral");
    }
    if (std::fabs(next - phi) <= kPhiRel * phi || hi - lo <= kPhiRel * phi) return next;
    phi = next;
  }
  throw Error(ErrorCode::non_convergence,
              "phi inversion did not converge at x = " + std::to_string(A - offset));
}

}  // namespace phaseplane
