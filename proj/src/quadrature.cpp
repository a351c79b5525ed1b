#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace phaseplane {

namespace {

constexpr int kMinLevel = 3;
constexpr int kMaxLevel = 12;
// Nodes closer to an endpoint than this fraction of the half-width are dropped.
constexpr double kEndpointFloor = 1e-60;
// Differences below this fraction of the absolute-value sum count as noise:
// integrands built from interpolants near a turning point lose a few digits
// to cancellation in the distance, so the floor sits well above epsilon.
constexpr double kNoiseFloor = 1e-13;

double abscissa_limit() {
  // 1 - tanh(u) ~ 2 exp(-2u) = floor  =>  u = log(2 / floor) / 2, t = asinh(2u / pi).
  const double u = 0.5 * std::log(2.0 / kEndpointFloor);
  return std::asinh(2.0 * u / std::numbers::pi);
}

class Summer {
 public:
  Summer(const EndpointIntegrand& g, double lo, double hi)
      : g_(g), lo_(lo), hi_(hi), half_(0.5 * (hi - lo)) {}

  // Weighted integrand value at abscissa parameter t (weight excludes the step).
  double term(double t) {
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double cosh_u = std::cosh(u);
    const double w = half_ * 0.5 * std::numbers::pi * std::cosh(t) / (cosh_u * cosh_u);
    // Distance to the nearer endpoint: half * (1 - tanh|u|) = half * 2 / (exp(2|u|) + 1).
    const double near = half_ * 2.0 / (std::exp(2.0 * std::fabs(u)) + 1.0);
    const double far = 2.0 * half_ - near;
    double x, d_lo, d_hi;
    if (t >= 0.0) {
      d_hi = near;
      d_lo = far;
      x = hi_ - d_hi;
    } else {
      d_lo = near;
      d_hi = far;
      x = lo_ + d_lo;
    }
    if (near <= 0.0 || w == 0.0) return 0.0;
    const double y = g_(x, d_lo, d_hi);
    ++evaluations;
    if (!std::isfinite(y)) {
      throw Error(ErrorCode::non_convergence,
                  "integrand is not finite at x = " + std::to_string(x));
    }
    return w * y;
  }

  std::size_t evaluations = 0;

 private:
  const EndpointIntegrand& g_;
  double lo_, hi_, half_;
};

}  // namespace

QuadResult quad_singular(const EndpointIntegrand& g, double lo, double hi, double tol) {
  if (!(lo < hi)) throw Error(ErrorCode::invalid_argument, "quadrature needs lo < hi");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "quadrature needs tol > 0");

  const double t_max = abscissa_limit();
  Summer summer(g, lo, hi);

  // Level 0: step 1, nodes at the integers.
  double h = 1.0;
  double sum = 0.0;
  double magnitude = 0.0;  // sum of |terms|, sets the rounding floor
  const auto add = [&](double t) {
    const double y = summer.term(t);
    sum += y;
    magnitude += std::fabs(y);
  };
  add(0.0);
  for (int k = 1; k <= static_cast<int>(t_max); ++k) {
    add(static_cast<double>(k));
    add(-static_cast<double>(k));
  }
  double estimate = h * sum;
  double previous = estimate;

  for (int level = 1; level <= kMaxLevel; ++level) {
    h *= 0.5;
    // New nodes sit at odd multiples of the halved step.
    for (double t = h; t <= t_max; t += 2.0 * h) {
      add(t);
      add(-t);
    }
    previous = estimate;
    estimate = h * sum;
    const double diff = std::fabs(estimate - previous);
    if (level >= kMinLevel && diff <= std::max(tol, kNoiseFloor * h * magnitude)) {
      return QuadResult{estimate, diff, level, summer.evaluations};
    }
  }
  char diff[32];
  std::snprintf(diff, sizeof diff, "%.3g", std::fabs(estimate - previous));
  throw Error(ErrorCode::non_convergence, "tanh-sinh quadrature did not converge by level " +
                                              std::to_string(kMaxLevel) + " (last difference " +
                                              diff + ")");
}

QuadResult quad_singular(const std::function<double(double)>& g, double lo, double hi,
                         double tol) {
  // Nodes that round onto an endpoint are skipped; use the endpoint-aware form
  // when the integrand is singular there and full accuracy matters.
  const EndpointIntegrand wrapped = [&g, lo, hi](double x, double, double) {
    return (x <= lo || x >= hi) ? 0.0 : g(x);
  };
  return quad_singular(wrapped, lo, hi, tol);
}

}  // namespace phaseplane
