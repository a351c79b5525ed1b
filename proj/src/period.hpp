#pragma once

#include <functional>

#include "reduction.hpp"
#include "separable.hpp"

namespace phaseplane {

enum class PeriodMethod { symmetric_quadrature, two_branch_quadrature, shooting };
const char* to_string(PeriodMethod method);

struct PeriodEstimate {
  double T = 0.0;
  double err = 0.0;
  PeriodMethod method = PeriodMethod::symmetric_quadrature;

  double omega() const;
};

/// phi evaluated at x, with the exact distance A - x passed alongside.
using PhiOnQuarter = std::function<double(double x, double dist_to_A)>;

/// Quarter-period formula T = 4 * int_0^A dx / phi(x), for orbits symmetric
/// about x = 0 with phi(A) = 0 and phi > 0 on (0, A).
PeriodEstimate period_symmetric(const PhiOnQuarter& phi, double A, double tol);
PeriodEstimate period_symmetric(const std::function<double(double)>& phi, double A, double tol);

/// Quarter-period formula with phi taken from a branch that starts at A and
/// covers [0, A].
PeriodEstimate period_symmetric(const BranchProfile& branch, double tol);

/// Quarter-period formula with phi from the product-form inversion.
PeriodEstimate period_symmetric(const SeparableSystem& sys, double A, double tol);

/// Time spent on one branch: int dx / |phi(x)| between its turning points.
PeriodEstimate branch_transit_time(const BranchProfile& branch, double tol);

/// Full period of a closed orbit as the sum of both branch transit times.
/// Throws Error(not_closed) unless report.verdict is closed.
PeriodEstimate period_two_branch(const ClosureReport& report, double tol);

// The overloads above report quadrature error only. The ones below start from
// the system, repeat the branch integration at a tenfold looser tolerance and
// add the change in T to err, so err also covers the branch profile itself.

/// Quarter-period formula on the lower branch from (A, 0).
PeriodEstimate period_symmetric(const OscillatorSystem& sys, double A,
                                const ClosureOptions& options, double quad_tol);

/// Two-branch period for an already computed closure.
PeriodEstimate period_two_branch(const OscillatorSystem& sys, const ClosureReport& report,
                                 const ClosureOptions& options, double quad_tol);
PeriodEstimate period_two_branch(const OscillatorSystem& sys, double A,
                                 const ClosureOptions& options, double quad_tol);

}  // namespace phaseplane
