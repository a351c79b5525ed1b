#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "errors.hpp"

namespace phaseplane {

namespace {

constexpr double kStateGuard = 1e6;
constexpr double kEventTimeTol = 1e-12;
constexpr double kMaxSimulatedTime = 1e4;
constexpr std::size_t kMaxSteps = 10'000'000;

constexpr double kSettleMargin = 10.0;

ode::StepControl control_for(double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
  ode::StepControl c;
  c.rtol = tol;
  c.atol = tol;
  c.max_steps = kMaxSteps;
  return c;
}

auto make_rhs(const OscillatorSystem& sys) {
  return [&sys](double, const ode::Vec<2>& y) -> ode::Vec<2> { return {y[1], sys.f(y[0], y[1])}; };
}

void check_guard(const ode::DenseSegment<2>& seg) {
  const auto y = seg.y1();
  if (!(std::fabs(y[0]) <= kStateGuard && std::fabs(y[1]) <= kStateGuard)) {
    throw Error(ErrorCode::guard_tripped,
                "state left the guard box at t = " + std::to_string(seg.t1()));
  }
}

// Crossing of v = 0 inside an accepted step, if any.
std::optional<OrbitEvent> find_crossing(const ode::DenseSegment<2>& seg) {
  const double v0 = seg.y0()[1];
  const double v1 = seg.y1()[1];
  Crossing dir;
  if (v0 > 0.0 && v1 <= 0.0) {
    dir = Crossing::downward;
  } else if (v0 < 0.0 && v1 >= 0.0) {
    dir = Crossing::upward;
  } else {
    return std::nullopt;
  }
  double lo = seg.t0;
  double hi = seg.t1();
  while (hi - lo > kEventTimeTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double vm = seg.at(mid)[1];
    if ((vm > 0.0) == (v0 > 0.0) && vm != 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double te = 0.5 * (lo + hi);
  return OrbitEvent{te, seg.at(te)[0], dir};
}

}  // namespace

std::array<double, 2> OrbitTrace::state_at(double t) const {
  if (segments_.empty() || t < segments_.front().t0 || t > segments_.back().t1()) {
    throw Error(ErrorCode::out_of_range, "t = " + std::to_string(t) + " outside the trace");
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double value, const auto& seg) { return value < seg.t0; });
  if (it != segments_.begin()) --it;
  return it->at(t);
}

OrbitTrace simulate(const OscillatorSystem& sys, double x0, double v0, double t_end, double tol) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::invalid_argument, "t_end must be positive");
  const ode::StepControl control = control_for(tol);
  OrbitTrace trace;
  trace.samples_.push_back({0.0, x0, v0});
  ode::integrate<2>(make_rhs(sys), 0.0, ode::Vec<2>{x0, v0}, t_end, control,
                    [&](const ode::DenseSegment<2>& seg) {
                      check_guard(seg);
                      trace.segments_.push_back(seg);
                      if (auto ev = find_crossing(seg)) trace.events_.push_back(*ev);
                      const auto y = seg.y1();
                      trace.samples_.push_back({seg.t1(), y[0], y[1]});
                      return true;
                    });
  return trace;
}

PeriodMeasurement measure_period(const OrbitTrace& trace) {
  const auto& events = trace.events();
  if (events.size() < 2) {
    throw Error(ErrorCode::insufficient_events,
                "need at least two crossings after the start, found " +
                    std::to_string(events.size()));
  }
  // The start is a turning point of the opposite kind to the first crossing.
  const Crossing start_kind =
      events.front().direction == Crossing::downward ? Crossing::upward : Crossing::downward;
  for (const auto& ev : events) {
    if (ev.direction == start_kind) {
      return PeriodMeasurement{ev.t - trace.samples().front().t, ev.x};
    }
  }
  throw Error(ErrorCode::insufficient_events, "no crossing matches the starting direction");
}

PeriodMeasurement shoot_period(const OscillatorSystem& sys, double x0, double tol, double t_max) {
  const ode::StepControl control = control_for(tol);
  std::optional<Crossing> first;
  std::optional<PeriodMeasurement> result;
  ode::integrate<2>(make_rhs(sys), 0.0, ode::Vec<2>{x0, 0.0}, t_max, control,
                    [&](const ode::DenseSegment<2>& seg) {
                      check_guard(seg);
                      const auto ev = find_crossing(seg);
                      if (!ev) return true;
                      if (!first) {
                        first = ev->direction;
                        return true;
                      }
                      if (ev->direction != *first) {
                        result = PeriodMeasurement{ev->t, ev->x};
                        return false;
                      }
                      return true;
                    });
  if (!result) {
    throw Error(ErrorCode::insufficient_events,
                "no full period observed before t = " + std::to_string(t_max));
  }
  return *result;
}

SteadyState steady_amplitude(const OscillatorSystem& sys, double x0, double tol) {
  // The stepper's own amplitude drift is a few tol per period (about 2.6 tol
  // on the harmonic oscillator), so integrate tighter than the settling test.
  const ode::StepControl control = control_for(tol / kSettleMargin);
  const double floor = 1e-6 * std::max(1.0, std::fabs(x0));
  std::vector<OrbitEvent> maxima;
  std::optional<SteadyState> result;
  bool decayed = false;
  ode::integrate<2>(make_rhs(sys), 0.0, ode::Vec<2>{x0, 0.0}, kMaxSimulatedTime, control,
                    [&](const ode::DenseSegment<2>& seg) {
                      check_guard(seg);
                      const auto ev = find_crossing(seg);
                      if (!ev || ev->direction != Crossing::downward) return true;
                      maxima.push_back(*ev);
                      if (std::fabs(ev->x) < floor) {
                        decayed = true;
                        return false;
                      }
                      const std::size_t n = maxima.size();
                      if (n < 4) return true;
                      for (std::size_t k = n - 3; k < n; ++k) {
                        const double scale = std::max(1.0, std::fabs(maxima[k].x));
                        if (std::fabs(maxima[k].x - maxima[k - 1].x) > tol * scale) return true;
                      }
                      result = SteadyState{maxima[n - 1].x, maxima[n - 1].t - maxima[n - 2].t};
                      return false;
                    });
  if (decayed) {
    throw Error(ErrorCode::no_attractor,
                "oscillation decays below " + std::to_string(floor) + ": no periodic attractor");
  }
  if (!result) {
    if (maxima.size() < 2) {
      throw Error(ErrorCode::no_attractor, "orbit does not oscillate: no periodic attractor");
    }
    throw Error(ErrorCode::non_convergence,
                "amplitude envelope did not settle before t = " +
                    std::to_string(kMaxSimulatedTime));
  }
  return *result;
}

double el_residual(const OscillatorSystem& sys, double x, double v) {
  const EvalResult r = sys.f_full(x, v);
  return r.d_xv * v + r.d_vv * r.value + r.d_x;
}

std::vector<double> el_residual_series(const OscillatorSystem& sys, const OrbitTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.samples().size());
  for (const auto& s : trace.samples()) out.push_back(el_residual(sys, s.x, s.v));
  return out;
}

}  // namespace phaseplane
