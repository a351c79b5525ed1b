// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "period.hpp"
#include "quadrature.hpp"
#include "random_expr.hpp"
#include "reduction.hpp"

using namespace phaseplane;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome mickens_reproduction() {
  Outcome o;
  const OscillatorSystem sys = catalog_get("mickens", {{"s", 2}});
  const ClosureOptions opts{1e-12, 1e-6};
  double worst_pair = 0.0, worst_oracle = 0.0, slowest = 0.0;
  for (double A : {0.5, 1.0, 2.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    // exp(A^2 - x^2) - 1 with A^2 - x^2 = (A - x)(A + x) taken from the exact distance.
    const double closed = period_symmetric(
        [A](double x, double d) { return std::sqrt(std::expm1(d * (A + x))); }, A, 1e-13).T;
    const double reduced = period_symmetric(sys, A, opts, 1e-13).T;
    const double separable = period_symmetric(*sys.separable(), A, 1e-13).T;
    const double oracle = measure_period(simulate(sys, A, 0.0, 30.0, 1e-12)).T;
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double pair = std::max({rel(closed, reduced), rel(closed, separable),
                                  rel(reduced, separable)});
    const double vs_oracle =
        std::max({rel(closed, oracle), rel(reduced, oracle), rel(separable, oracle)});
    worst_pair = std::max(worst_pair, pair);
    worst_oracle = std::max(worst_oracle, vs_oracle);
    slowest = std::max(slowest, seconds);
    o.require(pair <= 1e-8, fmt("A=%g pairwise rel %.3g > 1e-8", A, pair));
    o.require(vs_oracle <= 1e-6, fmt("A=%g oracle rel %.3g > 1e-6", A, vs_oracle));
    o.require(seconds < 1.0, fmt("A=%g took %.3g s", A, seconds));
  }
  if (o.pass) {
    o.detail = fmt("pairwise rel <= %.2g, oracle rel <= %.2g, slowest amplitude %.3g s",
                   worst_pair, worst_oracle, slowest);
  }
  return o;
}

Outcome isochrony() {
  Outcome o;
  const OscillatorSystem sys = catalog_get("harmonic");
  const ClosureOptions opts{1e-12, 1e-6};
  double worst = 0.0;
  for (double A : {0.1, 1.0, 10.0}) {
    const double sym = period_symmetric(sys, A, opts, 1e-13).T;
    const double two = period_two_branch(sys, A, opts, 1e-13).T;
    worst = std::max({worst, std::fabs(sym - kTwoPi), std::fabs(two - kTwoPi)});
    o.require(std::fabs(sym - kTwoPi) <= 1e-8, fmt("A=%g symmetric |T-2pi| = %.3g", A, sym - kTwoPi));
    o.require(std::fabs(two - kTwoPi) <= 1e-8, fmt("A=%g two-branch |T-2pi| = %.3g", A, two - kTwoPi));
  }
  if (o.pass) o.detail = fmt("max |T - 2pi| = %.3g over both methods", worst);
  return o;
}

Outcome conservative_closure() {
  Outcome o;
  std::mt19937_64 rng(20241016);
  // Open at 0.1, closed at 3.
  std::uniform_real_distribution<double> dist(0.1, 3.0);
  std::vector<double> amplitudes;
  for (int i = 0; i < 10; ++i) {
    double A = dist(rng);
    if (A == 0.1) A = 3.0;
    amplitudes.push_back(A);
  }
  const ClosureOptions opts{1e-10, 1e-6};
  double worst_defect = 0.0, worst_period = 0.0;
  for (const char* name : {"harmonic", "duffing"}) {
    const OscillatorSystem sys = catalog_get(name);
    for (double A : amplitudes) {
      const double defect = std::fabs(closure_defect(sys, A, opts).defect);
      worst_defect = std::max(worst_defect, defect);
      o.require(defect <= 1e-8, std::string(name) + fmt(" A=%.6g |defect| = %.3g", A, defect));
      if (std::string(name) == "duffing") {
        const double T = period_symmetric(sys, A, opts, 1e-12).T;
        const double oracle = shoot_period(sys, A, 1e-12).T;
        worst_period = std::max(worst_period, rel(T, oracle));
        o.require(rel(T, oracle) <= 1e-6, fmt("duffing A=%.6g period rel %.3g", A, rel(T, oracle)));
      }
    }
  }
  if (o.pass) {
    o.detail = fmt("20 orbits, max |defect| = %.3g, Duffing period rel <= %.3g", worst_defect,
                   worst_period);
  }
  return o;
}

Outcome limit_cycle() {
  Outcome o;
  const LimitCycleFixture& fx = vanderpol_fixtures().front();
  const OscillatorSystem sys = catalog_get("vanderpol", {{"mu", 1.0}});
  const ClosureOptions opts{1e-10, 1e-6};
  const double A = find_limit_cycle_amplitude(sys, 1.0, 3.0, 1e-10, opts);
  const double T = period_two_branch(sys, A, opts, 1e-10).T;
  o.require(std::fabs(A - fx.amplitude) <= 1e-4, fmt("A* = %.12g vs fixture %.12g", A, fx.amplitude));
  o.require(rel(T, fx.period) <= 1e-3, fmt("T = %.12g vs fixture %.12g", T, fx.period));
  // The fixture is still what the oracle produces.
  const SteadyState live = steady_amplitude(sys, 0.5, 1e-12);
  o.require(std::fabs(live.amplitude - fx.amplitude) <= 1e-9,
            fmt("oracle now gives %.12g, fixture %.12g", live.amplitude, fx.amplitude));
  if (o.pass) {
    o.detail = fmt("A* = %.10f (|diff| %.2g), T = %.10f (rel %.2g)", A,
                   std::fabs(A - fx.amplitude), T, rel(T, fx.period));
  }
  return o;
}

Outcome non_periodicity() {
  Outcome o;
  const OscillatorSystem sys = catalog_get("damped-linear");
  for (double A : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    const ClosureReport r = closure_defect(sys, A);
    o.require(r.verdict == Verdict::not_closed,
              fmt("A=%g verdict is ", A) + to_string(r.verdict));
    const double back = shoot_period(sys, A, 1e-10).return_amplitude;
    o.require(back < A, fmt("A=%g oracle return amplitude %.12g", A, back));
  }
  if (o.pass) o.detail = "5 amplitudes: all not-closed, oracle return amplitude below A";
  return o;
}

Outcome quadrature_suite() {
  Outcome o;
  struct Case {
    const char* name;
    EndpointIntegrand g;
    double exact;
  };
  const Case cases[] = {
      {"x^-1/2", [](double x, double, double) { return 1.0 / std::sqrt(x); }, 2.0},
      {"(1-x^2)^-1/2", [](double x, double, double d_hi) { return 1.0 / std::sqrt(d_hi * (1 + x)); },
       std::numbers::pi / 2},
      {"ln(1/x)", [](double x, double, double) { return -std::log(x); }, 1.0},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    const QuadResult q = quad_singular(c.g, 0.0, 1.0, 1e-12);
    const double err = std::fabs(q.value - c.exact);
    worst = std::max(worst, err);
    o.require(err <= 1e-10, std::string(c.name) + fmt(": error %.3g", err));
    o.require(err <= q.err, std::string(c.name) + fmt(": estimate %.3g below true error %.3g",
                                                      q.err, err));
  }
  if (o.pass) o.detail = fmt("max error %.3g, every estimate bounds its true error", worst);
  return o;
}

Outcome derivative_correctness() {
  Outcome o;
  testing::RandomExpr gen(1000);
  const double h = 1e-6;
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = gen.make(4);
    const double x = gen.coordinate();
    const double v = gen.coordinate();
    const EvalResult r = eval_full(e, x, v);
    const double fd_x = (eval(e, x + h, v) - eval(e, x - h, v)) / (2 * h);
    const double fd_v = (eval(e, x, v + h) - eval(e, x, v - h)) / (2 * h);
    // Relative to the partial itself, with unit scale for partials near zero.
    const double ex = std::fabs(fd_x - r.d_x) / std::max(1.0, std::fabs(r.d_x));
    const double ev = std::fabs(fd_v - r.d_v) / std::max(1.0, std::fabs(r.d_v));
    worst = std::max({worst, ex, ev});
    if (ex > 1e-5 || ev > 1e-5) {
      if (++failures <= 3) o.require(false, e.to_string() + fmt(" at (%g, %g)", x, v));
    }
  }
  if (failures > 0) o.require(false, std::to_string(failures) + " of 1000 pairs off");
  if (o.pass) o.detail = fmt("1000 pairs, worst relative difference %.3g", worst);
  return o;
}

Outcome residual_diagnostic() {
  Outcome o;
  const double a = el_residual(catalog_get("harmonic"), 0.3, -2.0);
  const double b = el_residual(OscillatorSystem::parse("v"), 1.5, 0.5);
  const double c = el_residual(catalog_get("mickens"), 1.0, 0.0);
  o.require(std::fabs(a + 1.0) <= 1e-12, fmt("harmonic residual %.17g", a));
  o.require(std::fabs(b) <= 1e-12, fmt("f = v residual %.17g", b));
  o.require(std::fabs(c - 1.0) <= 1e-12, fmt("Mickens residual %.17g", c));

  // d/dt f_v by a centered difference with the local sample spacing, plus f_x.
  // The difference is second order in that spacing, so the trace is taken at
  // a tight tolerance to keep the samples close together.
  const OscillatorSystem sys = catalog_get("mickens");
  const OrbitTrace tr = simulate(sys, 1.0, 0.0, 10.0, 1e-14);
  const auto series = el_residual_series(sys, tr);
  const auto& s = tr.samples();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double dt = std::min(s[i + 1].t - s[i].t, s[i].t - s[i - 1].t);
    const auto fv = [&](double t) {
      const auto y = tr.state_at(t);
      return sys.f_full(y[0], y[1]).d_v;
    };
    const double expected =
        (fv(s[i].t + dt) - fv(s[i].t - dt)) / (2 * dt) + sys.f_full(s[i].x, s[i].v).d_x;
    worst = std::max(worst, std::fabs(series[i] - expected) / std::max(1.0, std::fabs(expected)));
  }
  o.require(worst <= 1e-4, fmt("along-trace relative difference %.3g", worst));
  if (o.pass) {
    o.detail = fmt("worked examples exact, along-trace relative difference %.3g over %g samples",
                   worst, static_cast<double>(s.size()));
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"Mickens amplitude-period reproduction", mickens_reproduction},
      {"harmonic isochrony", isochrony},
      {"conservative closure", conservative_closure},
      {"van der Pol limit-cycle discrimination", limit_cycle},
      {"damped non-periodicity detection", non_periodicity},
      {"singular quadrature suite", quadrature_suite},
      {"dual-number derivative correctness", derivative_correctness},
      {"first-variation residual diagnostic", residual_diagnostic},
  };
  int failed = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %d. %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    if (!o.pass) ++failed;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
