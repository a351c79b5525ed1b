#pragma once

#include <array>
#include <vector>

#include "dopri5.hpp"
#include "system.hpp"

namespace phaseplane {

/// Direction in which v crosses zero: downward (+ to -) marks a maximum of
/// x, upward (- to +) a minimum.
enum class Crossing { downward, upward };

struct OrbitSample {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
};

struct OrbitEvent {
  double t = 0.0;
  double x = 0.0;
  Crossing direction = Crossing::downward;
};

/// Time-domain trajectory with its dense interpolant and the v = 0 crossings.
class OrbitTrace {
 public:
  const std::vector<OrbitSample>& samples() const { return samples_; }
  const std::vector<OrbitEvent>& events() const { return events_; }
  double t_end() const { return samples_.empty() ? 0.0 : samples_.back().t; }
  /// (x, v) at time t, from the dense output of the covering step.
  std::array<double, 2> state_at(double t) const;

 private:
  friend OrbitTrace simulate(const OscillatorSystem&, double, double, double, double);
  std::vector<OrbitSample> samples_;
  std::vector<OrbitEvent> events_;
  std::vector<ode::DenseSegment<2>> segments_;
};

/// Integrates x' = v, v' = f(x, v) from (x0, v0) over [0, t_end] with the
/// 5(4) pair at rtol = atol = tol. Crossings are located to 1e-12 in time.
/// Throws Error(guard_tripped) when |x| or |v| exceeds 1e6.
OrbitTrace simulate(const OscillatorSystem& sys, double x0, double v0, double t_end, double tol);

struct PeriodMeasurement {
  double T = 0.0;
  double return_amplitude = 0.0;
};

/// For a trace started at a turning point: the time until the orbit next
/// crosses v = 0 in the same direction as at the start, and x there.
PeriodMeasurement measure_period(const OrbitTrace& trace);

/// Simulates from (x0, 0) just long enough to measure one period.
PeriodMeasurement shoot_period(const OscillatorSystem& sys, double x0, double tol,
                               double t_max = 1e4);

struct SteadyState {
  double amplitude = 0.0;
  double period = 0.0;
};

/// Long-time envelope of the maxima of x until three consecutive changes are
/// below tol. Throws Error(no_attractor) when the maxima decay to zero or
/// vanish and Error(non_convergence) past t = 1e4.
SteadyState steady_amplitude(const OscillatorSystem& sys, double x0, double tol);

/// d/dt(df/dv) + df/dx along a trajectory, with the time derivative expanded
/// on-shell: f_vx v + f_vv f + f_x.
double el_residual(const OscillatorSystem& sys, double x, double v);

std::vector<double> el_residual_series(const OscillatorSystem& sys, const OrbitTrace& trace);

}  // namespace phaseplane
