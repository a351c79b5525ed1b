#include "period.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace phaseplane {

const char* to_string(PeriodMethod method) {
  switch (method) {
    case PeriodMethod::symmetric_quadrature: return "symmetric-quadrature";
    case PeriodMethod::two_branch_quadrature: return "two-branch-quadrature";
    case PeriodMethod::shooting: return "shooting";
  }
  return "?";
}

double PeriodEstimate::omega() const { return 2.0 * std::numbers::pi / T; }

namespace {

[[noreturn]] void non_positive_phi(double x) {
  throw Error(ErrorCode::out_of_range,
              "phi is not positive at interior point x = " + std::to_string(x));
}

// Integral of ds / sqrt(u) over [s_from, s_to] along the branch, one smooth
// piece at a time so every piece sees an analytic integrand. Endpoint distances
// are passed through exactly so the turning-point singularities stay resolved.
QuadResult branch_time(const BranchProfile& branch, double s_from, double s_to, double tol) {
  const double length = branch.length();
  if (branch.has_tail() && s_to == length && s_from < length - branch.tail_length()) {
    // The tail carries its own crossing time.
    QuadResult q = branch_time(branch, s_from, length - branch.tail_length(), tol);
    q.value += branch.tail_time();
    return q;
  }
  std::vector<double> cuts{s_from};
  for (double b : branch.breakpoints()) {
    if (b > s_from && b < s_to) cuts.push_back(b);
  }
  cuts.push_back(s_to);
  QuadResult total{0.0, 0.0, 0, 0};
  const double span = s_to - s_from;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const EndpointIntegrand integrand = [&branch, lo, hi, length](double s, double d_lo,
                                                                  double d_hi) {
      const double u = branch.u_between(lo + d_lo, (length - hi) + d_hi);
      if (!(u > 0.0)) non_positive_phi(branch.spec().start + branch.spec().direction * s);
      return 1.0 / std::sqrt(u);
    };
    const QuadResult q = quad_singular(integrand, lo, hi, tol * (hi - lo) / span);
    total.value += q.value;
    total.err += q.err;
    total.level = std::max(total.level, q.level);
    total.evaluations += q.evaluations;
  }
  return total;
}

}  // namespace

PeriodEstimate period_symmetric(const PhiOnQuarter& phi, double A, double tol) {
  if (!(A > 0.0)) throw Error(ErrorCode::invalid_argument, "amplitude must be positive");
  const EndpointIntegrand integrand = [&phi](double x, double, double dist_hi) {
    const double p = phi(x, dist_hi);
    if (!(p > 0.0)) non_positive_phi(x);
    return 1.0 / p;
  };
  const QuadResult q = quad_singular(integrand, 0.0, A, 0.25 * tol);
  return PeriodEstimate{4.0 * q.value, 4.0 * q.err, PeriodMethod::symmetric_quadrature};
}

PeriodEstimate period_symmetric(const std::function<double(double)>& phi, double A,
                                double tol) {
  return period_symmetric([&phi](double x, double) { return phi(x); }, A, tol);
}

PeriodEstimate period_symmetric(const BranchProfile& branch, double tol) {
  const double A = branch.spec().start;
  if (!branch.contains(0.0) || !(A > 0.0) || branch.spec().direction > 0) {
    throw Error(ErrorCode::out_of_range, "branch does not cover [0, A]");
  }
  const QuadResult q = branch_time(branch, 0.0, A, 0.25 * tol);
  return PeriodEstimate{4.0 * q.value, 4.0 * q.err, PeriodMethod::symmetric_quadrature};
}

PeriodEstimate period_symmetric(const SeparableSystem& sys, double A, double tol) {
  return period_symmetric(
      [&sys, A](double, double dist_to_A) { return phi_separable_offset(sys, A, dist_to_A); },
      A, tol);
}

PeriodEstimate branch_transit_time(const BranchProfile& branch, double tol) {
  const QuadResult q = branch_time(branch, 0.0, branch.length(), tol);
  return PeriodEstimate{q.value, q.err, PeriodMethod::two_branch_quadrature};
}

PeriodEstimate period_two_branch(const ClosureReport& report, double tol) {
  if (report.verdict != Verdict::closed || !report.second) {
    throw Error(ErrorCode::not_closed, "period needs a closed orbit (verdict " +
                                           std::string(to_string(report.verdict)) + ")");
  }
  const PeriodEstimate a = branch_transit_time(report.first, 0.5 * tol);
  const PeriodEstimate b = branch_transit_time(*report.second, 0.5 * tol);
  return PeriodEstimate{a.T + b.T, a.err + b.err, PeriodMethod::two_branch_quadrature};
}

namespace {

constexpr double kCoarsening = 10.0;

ClosureOptions coarsened(const ClosureOptions& options) {
  ClosureOptions coarse = options;
  coarse.tol *= kCoarsening;
  return coarse;
}

PeriodEstimate with_profile_error(PeriodEstimate fine, double T_coarse) {
  fine.err += std::fabs(fine.T - T_coarse);
  return fine;
}

}  // namespace

PeriodEstimate period_symmetric(const OscillatorSystem& sys, double A,
                                const ClosureOptions& options, double quad_tol) {
  if (!(A > 0.0)) throw Error(ErrorCode::invalid_argument, "amplitude must be positive");
  const BranchSpec lower{A, -1, -1};
  const PeriodEstimate fine = period_symmetric(integrate_branch(sys, lower, options.tol), quad_tol);
  const PeriodEstimate coarse =
      period_symmetric(integrate_branch(sys, lower, coarsened(options).tol), quad_tol);
  return with_profile_error(fine, coarse.T);
}

PeriodEstimate period_two_branch(const OscillatorSystem& sys, const ClosureReport& report,
                                 const ClosureOptions& options, double quad_tol) {
  const PeriodEstimate fine = period_two_branch(report, quad_tol);
  // The looser run only needs both branches, not a closed verdict.
  const ClosureReport coarse = closure_defect(sys, report.amplitude, coarsened(options));
  if (!coarse.second) return fine;
  const double T_coarse = branch_transit_time(coarse.first, 0.5 * quad_tol).T +
                          branch_transit_time(*coarse.second, 0.5 * quad_tol).T;
  return with_profile_error(fine, T_coarse);
}

PeriodEstimate period_two_branch(const OscillatorSystem& sys, double A,
                                 const ClosureOptions& options, double quad_tol) {
  return period_two_branch(sys, closure_defect(sys, A, options), options, quad_tol);
}

}  // namespace phaseplane
