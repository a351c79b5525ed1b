#pragma once

#include <optional>
#include <vector>

#include "dopri5.hpp"
#include "hermite.hpp"
#include "system.hpp"

namespace phaseplane {

/// One half-orbit in the phase plane: starts at the turning point `start`,
/// moves in x along `direction` (+1 right, -1 left) with velocity sign
/// `velocity_sign`, so that v = velocity_sign * sqrt(u(x)).
struct BranchSpec {
  double start = 0.0;
  int direction = -1;
  int velocity_sign = -1;
};

/// Local expansion u(s) = a s + b s^(3/2) + c s^2 + O(s^(5/2)) of u = v^2 at a
/// turning point, with s = direction * (x - start) >= 0.
struct SeedCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double at(double s) const { return s * (a + b * std::sqrt(s) + c * s); }
};

/// Throws Error(no_oscillation) when a <= 0, i.e. the force at the turning
/// point does not push the orbit into the requested direction.
SeedCoefficients seed_coefficients(const OscillatorSystem& sys, const BranchSpec& spec);

/// Sampled branch u(x) = phi(x)^2 of the first-integral ODE du/dx = 2 f(x, sigma sqrt(u)).
class BranchProfile {
 public:
  BranchProfile() = default;

  const BranchSpec& spec() const { return spec_; }
  /// Accepted step abscissae, strictly monotone in the branch direction, starting at `start`.
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& u_values() const { return u_; }
  const std::optional<double>& end_turning_point() const { return end_turning_; }

  /// Far end of the branch: its turning point, or the stop abscissa.
  double end() const { return spec_.start + spec_.direction * length_; }
  /// Distance |end - start| covered along x.
  double length() const { return length_; }
  bool contains(double x) const;

  /// u at x; throws Error(out_of_range) outside the branch.
  double u_at(double x) const;
  /// u at the point `from_start` past the start and `to_end` short of the end.
  /// Both distances are used as given, so near either turning point u keeps
  /// full relative accuracy.
  double u_between(double from_start, double to_end) const;
  /// du/dx of the stored interpolant (not of the ODE right-hand side).
  double du_dx(double x) const;

  const SeedCoefficients& seed() const { return seed_; }
  double seed_length() const { return seed_length_; }

  /// Ascending distances from the start, 0 through length(), between which
  /// u_between is a single smooth piece (a series or one dense segment).
  /// With a tail the last piece is the whole tail.
  std::vector<double> breakpoints() const;

  /// Near a returning end the branch is followed in w = |v| instead of x, where
  /// the equations stay regular. The tail covers the last tail_length() of the
  /// branch and also carries the exact time spent crossing it.
  bool has_tail() const { return !tail_.empty(); }
  double tail_length() const { return tail_q_; }
  double tail_time() const { return tail_time_; }

 private:
  friend bool build_tail(const OscillatorSystem&, BranchProfile&, double, double, double);
  friend BranchProfile integrate_branch(const OscillatorSystem&, const BranchSpec&, double,
                                        std::optional<double>);
  double dense_u(double from_start, double to_end) const;
  double tail_u(double to_end) const;

  BranchSpec spec_;
  SeedCoefficients seed_;
  double seed_length_ = 0.0;
  std::vector<ode::SepticSegment> segments_;  // independent variable s
  std::vector<double> grid_;
  std::vector<double> u_;
  double length_ = 0.0;
  std::optional<double> end_turning_;
  std::optional<SeedCoefficients> end_seed_;
  double end_seed_length_ = 0.0;
  // Tail: independent variable w, state (distance to the end, time to the end).
  std::vector<ode::DenseSegment<2>> tail_;
  double tail_w_ = 0.0;
  double tail_q_ = 0.0;
  double tail_time_ = 0.0;
  double end_force_ = 0.0;
};

inline constexpr double kTurnTolerance = 1e-12;

/// Integrates the branch from its turning point until u returns to zero, or
/// until x reaches x_stop. Throws Error(no_oscillation) from the seed,
/// Error(guard_tripped) when u blows up or x leaves the guard box, and the
/// stepper's and f's own errors.
BranchProfile integrate_branch(const OscillatorSystem& sys, const BranchSpec& spec, double tol,
                               std::optional<double> x_stop = std::nullopt);

enum class Verdict { closed, not_closed, no_oscillation };
const char* to_string(Verdict verdict);

struct ClosureReport {
  double amplitude = 0.0;
  /// Turning point reached by the first branch (below A for a downward departure).
  double lower_turning = 0.0;
  /// Turning point reached by the second branch; infinite if it never returns.
  double return_point = 0.0;
  double defect = 0.0;
  Verdict verdict = Verdict::no_oscillation;
  BranchProfile first;
  std::optional<BranchProfile> second;
};

struct ClosureOptions {
  double tol = 1e-10;
  double closure_tol = 1e-6;
};

/// Follows the orbit from (A, 0) over both half-branches and measures how far
/// the return turning point lands from A.
ClosureReport closure_defect(const OscillatorSystem& sys, double A,
                             const ClosureOptions& options = {});

/// Root of A -> closure defect inside [A_lo, A_hi], with |defect| <= tol.
/// Throws Error(conservative_family) when the defect vanishes over the whole
/// bracket and Error(no_sign_change) when the bracket does not straddle a root.
double find_limit_cycle_amplitude(const OscillatorSystem& sys, double A_lo, double A_hi,
                                  double tol, const ClosureOptions& options = {});

}  // namespace phaseplane
