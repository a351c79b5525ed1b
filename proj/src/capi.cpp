#include <algorithm>
#include <cmath>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "catalog.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "period.hpp"
#include "phaseplane/phaseplane.h"
#include "reduction.hpp"

struct pp_system {
  phaseplane::OscillatorSystem sys;
  std::string warning;
};

struct pp_closure {
  phaseplane::ClosureReport report;
  phaseplane::OscillatorSystem sys;
  phaseplane::ClosureOptions options;
};

namespace {

thread_local std::string last_error;
thread_local long last_offset = -1;

pp_status map_code(phaseplane::ErrorCode code) {
  using phaseplane::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return PP_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse: return PP_ERR_PARSE;
    case ErrorCode::domain: return PP_ERR_DOMAIN;
    case ErrorCode::no_oscillation:
    case ErrorCode::non_returning: return PP_ERR_NO_OSCILLATION;
    case ErrorCode::step_underflow:
    case ErrorCode::guard_tripped:
    case ErrorCode::non_convergence:
    case ErrorCode::insufficient_events: return PP_ERR_NUMERICAL;
    case ErrorCode::not_closed: return PP_ERR_NOT_CLOSED;
    case ErrorCode::no_sign_change: return PP_ERR_NO_SIGN_CHANGE;
    case ErrorCode::conservative_family: return PP_ERR_CONSERVATIVE;
    case ErrorCode::no_attractor: return PP_ERR_NO_ATTRACTOR;
    case ErrorCode::unknown_name: return PP_ERR_UNKNOWN_NAME;
    case ErrorCode::out_of_range: return PP_ERR_OUT_OF_RANGE;
    case ErrorCode::f2_zero: return PP_ERR_F2_ZERO;
  }
  return PP_ERR_INTERNAL;
}

pp_status fail(pp_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename Body>
pp_status guarded(Body&& body) {
  last_offset = -1;
  try {
    body();
    return PP_OK;
  } catch (const phaseplane::Error& e) {
    if (e.has_offset()) last_offset = static_cast<long>(e.offset());
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PP_ERR_INTERNAL, e.what());
  }
}

#define PP_REQUIRE(cond, what) \
  if (!(cond)) return fail(PP_ERR_INVALID_ARGUMENT, what)

phaseplane::ClosureOptions closure_options(const pp_options* options) {
  phaseplane::ClosureOptions o;
  if (options) {
    o.tol = options->tol;
    o.closure_tol = options->closure_tol;
  }
  return o;
}

pp_period to_c(const phaseplane::PeriodEstimate& p) {
  pp_period out;
  out.T = p.T;
  out.omega = p.omega();
  out.err = p.err;
  switch (p.method) {
    case phaseplane::PeriodMethod::symmetric_quadrature: out.method = PP_METHOD_SYMMETRIC; break;
    case phaseplane::PeriodMethod::two_branch_quadrature: out.method = PP_METHOD_TWO_BRANCH; break;
    case phaseplane::PeriodMethod::shooting: out.method = PP_METHOD_SHOOTING; break;
  }
  return out;
}

}  // namespace

extern "C" {

const char* pp_version(void) { return "1.0.0"; }

const char* pp_status_string(pp_status status) {
  switch (status) {
    case PP_OK: return "ok";
    case PP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PP_ERR_PARSE: return "parse error";
    case PP_ERR_NO_OSCILLATION: return "no oscillation";
    case PP_ERR_NUMERICAL: return "numerical failure";
    case PP_ERR_DOMAIN: return "domain error";
    case PP_ERR_NOT_CLOSED: return "orbit not closed";
    case PP_ERR_NO_SIGN_CHANGE: return "no sign change in bracket";
    case PP_ERR_CONSERVATIVE: return "closure defect identically zero";
    case PP_ERR_NO_ATTRACTOR: return "no periodic attractor";
    case PP_ERR_UNKNOWN_NAME: return "unknown name";
    case PP_ERR_OUT_OF_RANGE: return "out of range";
    case PP_ERR_F2_ZERO: return "f2 vanishes";
    case PP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pp_last_error(void) { return last_error.c_str(); }
long pp_last_error_offset(void) { return last_offset; }

pp_options pp_options_default(void) {
  const phaseplane::ClosureOptions d;
  return pp_options{d.tol, d.closure_tol};
}

const char* pp_verdict_string(pp_verdict verdict) {
  switch (verdict) {
    case PP_VERDICT_CLOSED: return "closed";
    case PP_VERDICT_NOT_CLOSED: return "not-closed";
    case PP_VERDICT_NO_OSCILLATION: return "no-oscillation";
  }
  return "?";
}

const char* pp_method_string(pp_period_method method) {
  switch (method) {
    case PP_METHOD_SYMMETRIC: return "symmetric-quadrature";
    case PP_METHOD_TWO_BRANCH: return "two-branch-quadrature";
    case PP_METHOD_SHOOTING: return "shooting";
  }
  return "?";
}

pp_status pp_system_parse(const char* expression, pp_system** out) {
  PP_REQUIRE(expression && out, "null argument");
  return guarded([&] {
    *out = new pp_system{phaseplane::OscillatorSystem::parse(expression), {}};
  });
}

pp_status pp_system_catalog(const char* name, const char* const* keys, const double* values,
                            size_t count, pp_system** out) {
  PP_REQUIRE(name && out, "null argument");
  PP_REQUIRE(count == 0 || (keys && values), "null parameter arrays");
  return guarded([&] {
    phaseplane::ParameterList params;
    for (size_t i = 0; i < count; ++i) {
      if (!keys[i]) throw phaseplane::Error(phaseplane::ErrorCode::invalid_argument, "null key");
      params.emplace_back(keys[i], values[i]);
    }
    auto sys = phaseplane::catalog_get(name, params);
    std::string warning;
    for (const auto& w : phaseplane::catalog_warnings(name, params)) {
      if (!warning.empty()) warning += "; ";
      warning += w;
    }
    *out = new pp_system{std::move(sys), std::move(warning)};
  });
}

void pp_system_free(pp_system* sys) { delete sys; }

pp_status pp_system_describe(const pp_system* sys, char* buffer, size_t capacity, size_t* needed) {
  PP_REQUIRE(sys, "null system");
  const std::string& text = sys->sys.description();
  if (needed) *needed = text.size() + 1;
  if (buffer && capacity > 0) {
    const size_t n = std::min(capacity - 1, text.size());
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
    if (n < text.size()) return fail(PP_ERR_OUT_OF_RANGE, "buffer too small");
  }
  return PP_OK;
}

const char* pp_system_warning(const pp_system* sys) {
  return (sys && !sys->warning.empty()) ? sys->warning.c_str() : nullptr;
}

int pp_system_is_separable(const pp_system* sys) {
  return sys && sys->sys.separable().has_value() ? 1 : 0;
}

int pp_system_is_symmetric(const pp_system* sys, double scale) {
  return sys && phaseplane::looks_symmetric(sys->sys, scale) ? 1 : 0;
}

pp_status pp_system_eval(const pp_system* sys, double x, double v, pp_eval* out) {
  PP_REQUIRE(sys && out, "null argument");
  return guarded([&] {
    const auto r = sys->sys.f_full(x, v);
    *out = pp_eval{r.value, r.d_x, r.d_v, r.d_xx, r.d_xv, r.d_vv};
  });
}

pp_status pp_el_residual(const pp_system* sys, double x, double v, double* out) {
  PP_REQUIRE(sys && out, "null argument");
  return guarded([&] { *out = phaseplane::el_residual(sys->sys, x, v); });
}

size_t pp_catalog_size(void) { return phaseplane::catalog().size(); }

const char* pp_catalog_name(size_t index) {
  const auto& c = phaseplane::catalog();
  return index < c.size() ? c[index].name.c_str() : nullptr;
}

pp_status pp_closure_compute(const pp_system* sys, double amplitude, const pp_options* options,
                             pp_closure** out) {
  PP_REQUIRE(sys && out, "null argument");
  return guarded([&] {
    const auto o = closure_options(options);
    *out = new pp_closure{phaseplane::closure_defect(sys->sys, amplitude, o), sys->sys, o};
  });
}

void pp_closure_free(pp_closure* closure) { delete closure; }

pp_status pp_closure_get_info(const pp_closure* closure, pp_closure_info* out) {
  PP_REQUIRE(closure && out, "null argument");
  const auto& r = closure->report;
  out->amplitude = r.amplitude;
  out->lower_turning = r.lower_turning;
  out->return_point = r.return_point;
  out->defect = r.defect;
  switch (r.verdict) {
    case phaseplane::Verdict::closed: out->verdict = PP_VERDICT_CLOSED; break;
    case phaseplane::Verdict::not_closed: out->verdict = PP_VERDICT_NOT_CLOSED; break;
    case phaseplane::Verdict::no_oscillation: out->verdict = PP_VERDICT_NO_OSCILLATION; break;
  }
  return PP_OK;
}

pp_status pp_closure_branch_u(const pp_closure* closure, int velocity_sign, double x, double* u) {
  PP_REQUIRE(closure && u, "null argument");
  PP_REQUIRE(velocity_sign == 1 || velocity_sign == -1, "velocity sign must be +1 or -1");
  const auto& r = closure->report;
  const phaseplane::BranchProfile* branch = nullptr;
  if (r.first.spec().velocity_sign == velocity_sign) {
    branch = &r.first;
  } else if (r.second) {
    branch = &*r.second;
  }
  if (!branch || !branch->contains(x)) return fail(PP_ERR_OUT_OF_RANGE, "x outside the branch");
  return guarded([&] { *u = branch->u_at(x); });
}

pp_status pp_closure_period(const pp_closure* closure, double tol, pp_period* out) {
  PP_REQUIRE(closure && out, "null argument");
  return guarded([&] {
    *out = to_c(phaseplane::period_two_branch(closure->sys, closure->report, closure->options, tol));
  });
}

pp_status pp_find_limit_cycle(const pp_system* sys, double amplitude_lo, double amplitude_hi,
                              double tol, const pp_options* options, double* amplitude) {
  PP_REQUIRE(sys && amplitude, "null argument");
  return guarded([&] {
    *amplitude = phaseplane::find_limit_cycle_amplitude(sys->sys, amplitude_lo, amplitude_hi, tol,
                                                        closure_options(options));
  });
}

pp_status pp_period_symmetric(const pp_system* sys, double amplitude, const pp_options* options,
                              double quad_tol, pp_period* out) {
  PP_REQUIRE(sys && out, "null argument");
  PP_REQUIRE(amplitude > 0.0, "amplitude must be positive");
  return guarded([&] {
    *out = to_c(phaseplane::period_symmetric(sys->sys, amplitude, closure_options(options),
                                             quad_tol));
  });
}

pp_status pp_period_symmetric_separable(const pp_system* sys, double amplitude, double quad_tol,
                                        pp_period* out) {
  PP_REQUIRE(sys && out, "null argument");
  if (!sys->sys.separable()) return fail(PP_ERR_INVALID_ARGUMENT, "system has no product form");
  return guarded([&] {
    *out = to_c(phaseplane::period_symmetric(*sys->sys.separable(), amplitude, quad_tol));
  });
}

pp_status pp_oracle_period(const pp_system* sys, double amplitude, double tol, double* period,
                           double* return_amplitude) {
  PP_REQUIRE(sys && period, "null argument");
  return guarded([&] {
    const auto m = phaseplane::shoot_period(sys->sys, amplitude, tol);
    *period = m.T;
    if (return_amplitude) *return_amplitude = m.return_amplitude;
  });
}

pp_status pp_oracle_steady(const pp_system* sys, double x0, double tol, double* amplitude,
                           double* period) {
  PP_REQUIRE(sys && amplitude && period, "null argument");
  return guarded([&] {
    const auto s = phaseplane::steady_amplitude(sys->sys, x0, tol);
    *amplitude = s.amplitude;
    *period = s.period;
  });
}

}  // extern "C"
