#include "reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"
#include "roots.hpp"

namespace phaseplane {

namespace {

constexpr double kBlowUpGuard = 1e12;
constexpr double kExtentGuard = 1e3;
constexpr std::size_t kMaxSteps = 1'000'000;
// The tail starts once u has fallen below this fraction of its running peak.
constexpr double kTailFraction = 0.25;

// Raised inside the tail equations when |v| stops decreasing monotonically.
struct NonMonotoneTail {};

void check_spec(const BranchSpec& spec) {
  if ((spec.direction != 1 && spec.direction != -1) ||
      (spec.velocity_sign != 1 && spec.velocity_sign != -1)) {
    throw Error(ErrorCode::invalid_argument, "branch direction and velocity sign must be +1 or -1");
  }
}

// Length of the interval covered by the series before the stepper takes over.
// The neglected O(s^(5/2)) term stays well below tol.
double seed_length(double x0, double tol) {
  double h = std::min(1e-3, 0.1 * std::sqrt(tol));
  if (x0 != 0.0) h = std::min(h, 1e-2 * std::fabs(x0));
  return h;
}

}  // namespace

SeedCoefficients seed_coefficients(const OscillatorSystem& sys, const BranchSpec& spec) {
  check_spec(spec);
  const EvalResult f = sys.f_full(spec.start, 0.0);
  const double d = spec.direction;
  const double sigma = spec.velocity_sign;
  SeedCoefficients seed;
  seed.a = 2.0 * d * f.value;
  if (!(seed.a > 0.0)) {
    throw Error(ErrorCode::no_oscillation,
                "no oscillation: f(" + std::to_string(spec.start) +
                    ", 0) does not push the orbit in the branch direction");
  }
  const double root_a = std::sqrt(seed.a);
  seed.b = (4.0 / 3.0) * d * sigma * f.d_v * root_a;
  seed.c = f.d_x + d * sigma * f.d_v * seed.b / (2.0 * root_a) + 0.5 * d * f.d_vv * seed.a;
  return seed;
}

bool BranchProfile::contains(double x) const {
  const double s = spec_.direction * (x - spec_.start);
  return s >= 0.0 && s <= length_;
}

double BranchProfile::dense_u(double from_start, double to_end) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), from_start,
                             [](double value, const auto& seg) { return value < seg.t0; });
  if (it != segments_.begin()) --it;
  if (to_end < from_start) {
    // Measure from the segment's far edge using the exact distance to the end.
    const double th1 = (to_end - (length_ - it->t1())) / it->h;
    return it->at_fraction(1.0 - th1, th1);
  }
  const double th = (from_start - it->t0) / it->h;
  return it->at_fraction(th, 1.0 - th);
}

double BranchProfile::u_between(double from_start, double to_end) const {
  if (from_start <= seed_length_ || segments_.empty()) {
    return std::max(0.0, seed_.at(std::max(0.0, from_start)));
  }
  if (has_tail() && to_end <= tail_q_) return tail_u(std::max(0.0, to_end));
  if (end_seed_ && to_end <= end_seed_length_) {
    return std::max(0.0, end_seed_->at(std::max(0.0, to_end)));
  }
  return std::max(0.0, dense_u(from_start, to_end));
}

double BranchProfile::tail_u(double to_end) const {
  if (to_end <= 0.0) return 0.0;
  // q grows monotonically with w, so locate the segment first.
  auto it = std::upper_bound(tail_.begin(), tail_.end(), to_end,
                             [](double q, const auto& seg) { return q < seg.y0()[0]; });
  if (it != tail_.begin()) --it;
  const auto& seg = *it;
  const auto g = [&seg, to_end](double w) { return seg.at(w)[0] - to_end; };
  const double ga = seg.y0()[0] - to_end;
  const double gb = std::max(seg.y1()[0] - to_end, 0.0);
  RootTolerance rt;
  rt.x_rel = 4e-16;
  rt.x_abs = std::numeric_limits<double>::min();
  const double w = ga >= 0.0 ? seg.t0 : gb == 0.0 ? seg.t1() : find_root(g, seg.t0, seg.t1(), ga, gb, rt).x;
  return w * w;
}

std::vector<double> BranchProfile::breakpoints() const {
  const double tail = has_tail()           ? length_ - tail_q_
                      : end_seed_          ? length_ - end_seed_length_
                                           : length_;
  std::vector<double> points{0.0};
  const auto push = [&points, tail](double s) {
    if (s > points.back() && s < tail) points.push_back(s);
  };
  if (!segments_.empty()) {
    push(seed_length_);
    for (const auto& seg : segments_) push(seg.t0);
  }
  if (tail > 0.0 && tail < length_) points.push_back(tail);
  points.push_back(length_);
  return points;
}

double BranchProfile::u_at(double x) const {
  const double s = spec_.direction * (x - spec_.start);
  const double slack = 1e-12 * std::max(1.0, length_);
  if (s < -slack || s > length_ + slack) {
    throw Error(ErrorCode::out_of_range, "x = " + std::to_string(x) + " lies outside the branch");
  }
  const double sc = std::clamp(s, 0.0, length_);
  return u_between(sc, length_ - sc);
}

double BranchProfile::du_dx(double x) const {
  const double d = spec_.direction;
  const double s = std::clamp(d * (x - spec_.start), 0.0, length_);
  const double t = length_ - s;
  if (s <= seed_length_ || segments_.empty()) {
    return d * (seed_.a + 1.5 * seed_.b * std::sqrt(s) + 2.0 * seed_.c * s);
  }
  if (has_tail() && t <= tail_q_) {
    // du/dx = 2 f, and f = -d w / (dq/dw) along the tail.
    const double w = std::sqrt(tail_u(t));
    if (w == 0.0) return 2.0 * end_force_;
    auto it = std::upper_bound(tail_.begin(), tail_.end(), w,
                               [](double value, const auto& seg) { return value < seg.t0; });
    if (it != tail_.begin()) --it;
    return -2.0 * d * w / it->derivative(w)[0];
  }
  if (end_seed_ && t <= end_seed_length_) {
    return -d * (end_seed_->a + 1.5 * end_seed_->b * std::sqrt(t) + 2.0 * end_seed_->c * t);
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), s,
                             [](double value, const auto& seg) { return value < seg.t0; });
  if (it != segments_.begin()) --it;
  return d * it->derivative(s);
}

// Finishes a returning branch in w = |v|: dx/dw = w / f and dt/dw = 1 / |f|
// are regular at the turning point, unlike du/dx near u = 0. A forward pass
// from the hand-over point finds the end, a backward pass from the end builds
// the tail. Returns false when f changes sign on the way.
bool build_tail(const OscillatorSystem& sys, BranchProfile& p, double s_sw, double u_sw,
                double tol) {
  const double d = p.spec_.direction;
  const double sigma = p.spec_.velocity_sign;
  const double x_sw = p.spec_.start + d * s_sw;
  const double w_sw = std::sqrt(u_sw);
  const auto force = [&](double x, double w) {
    const double f = sys.f(x, sigma * w);
    if (!(d * f < 0.0)) throw NonMonotoneTail{};
    return f;
  };
  ode::StepControl control;
  control.rtol = tol;
  control.atol = tol;
  control.max_steps = kMaxSteps;
  try {
    // Forward: tau = w_sw - w runs from 0 to w_sw, state is the distance travelled.
    double travelled = 0.0;
    ode::integrate<1>(
        [&](double tau, const ode::Vec<1>& y) -> ode::Vec<1> {
          const double w = w_sw - tau;
          return {-d * w / force(x_sw + d * y[0], w)};
        },
        0.0, ode::Vec<1>{0.0}, w_sw, control,
        [&](const ode::DenseSegment<1>& seg) {
          travelled = seg.y1()[0];
          return true;
        });
    const double length = s_sw + travelled;
    const double x_end = p.spec_.start + d * length;

    // Backward: w runs from 0 at the end up to w_sw, state is (q, time) to the end.
    std::vector<ode::DenseSegment<2>> tail;
    ode::integrate<2>(
        [&](double w, const ode::Vec<2>& y) -> ode::Vec<2> {
          const double f = force(x_end - d * y[0], w);
          return {-d * w / f, 1.0 / std::fabs(f)};
        },
        0.0, ode::Vec<2>{0.0, 0.0}, w_sw, control,
        [&](const ode::DenseSegment<2>& seg) {
          tail.push_back(seg);
          return true;
        });
    p.tail_ = std::move(tail);
    p.tail_w_ = w_sw;
    p.tail_q_ = p.tail_.back().y1()[0];
    p.tail_time_ = p.tail_.back().y1()[1];
    p.end_force_ = sys.f(x_end, 0.0);
    p.length_ = length;
    return true;
  } catch (const NonMonotoneTail&) {
    return false;
  }
}

BranchProfile integrate_branch(const OscillatorSystem& sys, const BranchSpec& spec, double tol,
                               std::optional<double> x_stop) {
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
  BranchProfile p;
  p.spec_ = spec;
  p.seed_ = seed_coefficients(sys, spec);
  const double x0 = spec.start;
  const double d = spec.direction;
  const double sigma = spec.velocity_sign;
  const double h0 = seed_length(x0, tol);
  p.seed_length_ = h0;

  const double s_guard = kExtentGuard * std::max(1.0, std::fabs(x0)) + std::fabs(x0);
  double s_target = s_guard;
  std::optional<double> s_stop;
  if (x_stop) {
    s_stop = d * (*x_stop - x0);
    if (!(*s_stop > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "x_stop lies behind the branch start");
    }
    s_target = std::min(*s_stop, s_guard);
  }

  p.grid_.push_back(x0);
  p.u_.push_back(0.0);
  if (s_stop && *s_stop <= h0) {
    p.length_ = *s_stop;
    p.grid_.push_back(*x_stop);
    p.u_.push_back(p.seed_.at(*s_stop));
    return p;
  }
  const double u0 = p.seed_.at(h0);
  p.grid_.push_back(x0 + d * h0);
  p.u_.push_back(u0);

  auto rhs = [&](double s, const ode::Vec<1>& u) -> ode::Vec<1> {
    const double v = sigma * std::sqrt(std::max(u[0], 0.0));
    return {2.0 * d * sys.f(x0 + d * s, v)};
  };

  // Derivatives of u along s from the expression's exact partials, with
  // w = sigma sqrt(u): u' = 2 d f, w' = u' / (2 w), u'' = 2 d (d f_x + f_v w')
  // and w'' = (u'' - 2 w'^2) / (2 w); the third derivative differentiates u''
  // once more. Where u has reached zero the quartic's derivatives stand in.
  auto jet = [&](const ode::DenseSegment<1>& seg, double th) {
    const double s = seg.t0 + th * seg.h;
    const double u = th == 0.0 ? seg.y0()[0] : seg.y1()[0];
    ode::Jet j;
    j.y = u;
    if (!(u > 0.0)) {
      const auto& r = seg.r;
      const double c1 = r[1][0] + r[2][0];
      const double c2 = -r[2][0] + r[3][0] + r[4][0];
      const double c3 = -r[3][0] - 2.0 * r[4][0];
      const double c4 = r[4][0];
      const double h = seg.h;
      j.d1 = (c1 + th * (2.0 * c2 + th * (3.0 * c3 + th * 4.0 * c4))) / h;
      j.d2 = (2.0 * c2 + th * (6.0 * c3 + th * 12.0 * c4)) / (h * h);
      j.d3 = (6.0 * c3 + th * 24.0 * c4) / (h * h * h);
      return j;
    }
    const double w = sigma * std::sqrt(u);
    const EvalResult e = sys.f_full(x0 + d * s, w);
    const double w1 = d * e.value / w;
    j.d1 = 2.0 * d * e.value;
    j.d2 = 2.0 * d * (d * e.d_x + e.d_v * w1);
    const double w2 = (j.d2 - 2.0 * w1 * w1) / (2.0 * w);
    j.d3 = 2.0 * d * (d * (d * e.d_xx + e.d_xv * w1) + w1 * (d * e.d_xv + e.d_vv * w1) + e.d_v * w2);
    return j;
  };
  auto hermite = [&](const ode::DenseSegment<1>& seg) {
    return ode::SepticSegment(seg.t0, seg.h, jet(seg, 0.0), jet(seg, 1.0));
  };

  ode::StepControl control;
  control.rtol = tol;
  control.atol = tol;
  control.h_init = 0.5 * h0;
  control.max_steps = kMaxSteps;

  bool turned = false;
  double u_peak = u0;
  bool tail_allowed = !s_stop;
  std::optional<double> s_switch;  // where the tail takes over
  auto on_step = [&](const ode::DenseSegment<1>& seg) {
    const double u1 = seg.y1()[0];
    if (!(std::fabs(u1) <= kBlowUpGuard)) {
      throw Error(ErrorCode::guard_tripped,
                  "u blew up past " + std::to_string(kBlowUpGuard) + " near x = " +
                      std::to_string(x0 + d * seg.t1()));
    }
    if (tail_allowed && u1 <= 0.0 && seg.y0()[0] > 0.0 && seg.derivative(seg.t0)[0] < 0.0) {
      // Stepped straight past the turn: hand over at the start of this step.
      s_switch = seg.t0;
      return false;
    }
    p.segments_.push_back(hermite(seg));
    if (tail_allowed && u1 > 0.0 && u1 < kTailFraction * u_peak && seg.derivative(seg.t1())[0] < 0.0) {
      s_switch = seg.t1();
      return false;
    }
    u_peak = std::max(u_peak, u1);
    if (u1 <= 0.0) {
      // The interpolant starts positive and ends non-positive on this step.
      double lo = seg.t0;
      double hi = seg.t1();
      while (hi - lo > kTurnTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (seg.at(mid)[0] > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      p.length_ = 0.5 * (lo + hi);
      turned = true;
      return false;
    }
    p.grid_.push_back(x0 + d * seg.t1());
    p.u_.push_back(u1);
    return true;
  };

  ode::integrate<1>(rhs, h0, ode::Vec<1>{u0}, s_target, control, on_step);

  if (s_switch) {
    const double s_sw = *s_switch;
    const double u_sw = s_sw == h0 ? u0 : p.dense_u(s_sw, std::numeric_limits<double>::infinity());
    if (build_tail(sys, p, s_sw, u_sw, tol)) {
      turned = true;
    } else {
      // |v| is not monotone near the end: finish in x after all.
      ode::StepControl rest = control;
      rest.h_init = 0.0;
      tail_allowed = false;
      ode::integrate<1>(rhs, s_sw, ode::Vec<1>{u_sw}, s_target, rest, on_step);
    }
  }

  if (!turned) {
    if (s_stop && s_target == *s_stop) {
      p.length_ = *s_stop;
      return p;
    }
    throw Error(ErrorCode::guard_tripped,
                "branch from x = " + std::to_string(x0) + " left the guard box without returning");
  }

  const double x_end = x0 + d * p.length_;
  p.grid_.push_back(x_end);
  p.u_.push_back(0.0);
  p.end_turning_ = x_end;
  try {
    p.end_seed_ = seed_coefficients(sys, BranchSpec{x_end, -spec.direction, spec.velocity_sign});
    p.end_seed_length_ = std::min(seed_length(x_end, tol), 0.25 * p.length_);
  } catch (const Error&) {
    // Tangential return: no usable local expansion, keep the dense output.
    p.end_seed_.reset();
  }
  return p;
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::closed: return "closed";
    case Verdict::not_closed: return "not-closed";
    case Verdict::no_oscillation: return "no-oscillation";
  }
  return "?";
}

ClosureReport closure_defect(const OscillatorSystem& sys, double A, const ClosureOptions& options) {
  if (!(A > 0.0)) throw Error(ErrorCode::invalid_argument, "amplitude must be positive");
  const double f0 = sys.f(A, 0.0);
  if (f0 == 0.0) {
    throw Error(ErrorCode::no_oscillation, "A = " + std::to_string(A) + " is an equilibrium");
  }
  // Downward departure when the force at (A, 0) points toward smaller x.
  const int d1 = f0 < 0.0 ? -1 : 1;

  ClosureReport report;
  report.amplitude = A;
  try {
    report.first = integrate_branch(sys, BranchSpec{A, d1, d1}, options.tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::guard_tripped) throw;
    throw Error(ErrorCode::no_oscillation,
                std::string("no oscillation: orbit from A never turns (") + e.what() + ")");
  }
  report.lower_turning = *report.first.end_turning_point();

  try {
    report.second = integrate_branch(sys, BranchSpec{report.lower_turning, -d1, -d1}, options.tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::guard_tripped && e.code() != ErrorCode::no_oscillation) throw;
    report.return_point = -d1 * std::numeric_limits<double>::infinity();
    report.defect = report.return_point;
    report.verdict = Verdict::no_oscillation;
    return report;
  }
  report.return_point = *report.second->end_turning_point();
  report.defect = report.return_point - A;
  report.verdict =
      std::fabs(report.defect) <= options.closure_tol ? Verdict::closed : Verdict::not_closed;
  return report;
}

double find_limit_cycle_amplitude(const OscillatorSystem& sys, double A_lo, double A_hi,
                                  double tol, const ClosureOptions& options) {
  if (!(A_lo > 0.0 && A_hi > A_lo)) {
    throw Error(ErrorCode::invalid_argument, "amplitude bracket must satisfy 0 < A_lo < A_hi");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
  auto defect = [&](double A) {
    const ClosureReport r = closure_defect(sys, A, options);
    if (r.verdict == Verdict::no_oscillation) {
      throw Error(ErrorCode::no_oscillation,
                  "orbit from A = " + std::to_string(A) + " does not return");
    }
    return r.defect;
  };
  const double d_lo = defect(A_lo);
  const double d_hi = defect(A_hi);
  const double zero = std::max(tol, options.closure_tol);
  if (std::fabs(d_lo) <= zero && std::fabs(d_hi) <= zero &&
      std::fabs(defect(0.5 * (A_lo + A_hi))) <= zero) {
    throw Error(ErrorCode::conservative_family,
                "closure defect vanishes across the bracket: every amplitude is periodic");
  }
  if ((d_lo > 0.0) == (d_hi > 0.0) && d_lo != 0.0 && d_hi != 0.0) {
    throw Error(ErrorCode::no_sign_change, "closure defect has the same sign at both ends");
  }
  RootTolerance rt;
  rt.f_abs = tol;
  rt.x_rel = 1e-15;
  return find_root(defect, A_lo, A_hi, d_lo, d_hi, rt).x;
}

}  // namespace phaseplane
