#pragma once

#include <cstddef>
#include <functional>

namespace phaseplane {

struct QuadResult {
  double value = 0.0;
  double err = 0.0;   // difference between the last two refinement levels
  int level = 0;
  std::size_t evaluations = 0;
};

/// Integrand that also receives the exact distances from x to each endpoint.
/// Near an endpoint these are accurate to full relative precision even when
/// x itself rounds to the endpoint.
using EndpointIntegrand = std::function<double(double x, double dist_lo, double dist_hi)>;

/// Tanh-sinh (double exponential) quadrature over [lo, hi]. The step is halved
/// level by level until two successive estimates differ by at most `tol`;
/// gives up with Error(non_convergence) after level 12. Non-finite integrand
/// values at interior nodes raise Error(non_convergence).
QuadResult quad_singular(const EndpointIntegrand& g, double lo, double hi, double tol);

QuadResult quad_singular(const std::function<double(double)>& g, double lo, double hi,
                         double tol);

}  // namespace phaseplane
