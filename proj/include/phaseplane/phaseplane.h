/*
 * phaseplane: first-integral reduction of second-order oscillators
 * x'' = f(x, x'), amplitude-period quadrature, and closure-based
 * periodic-orbit detection, with an independent time-domain oracle.
 *
 * All handles are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Every fallible call returns a pp_status;
 * on failure pp_last_error() describes the problem for the calling thread.
 * Handles are immutable after creation and may be shared between threads.
 */
#ifndef PHASEPLANE_H
#define PHASEPLANE_H

#include <stddef.h>

#if defined(_WIN32)
#define PP_API __declspec(dllexport)
#else
#define PP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pp_status {
  PP_OK = 0,
  PP_ERR_INVALID_ARGUMENT = 1,
  PP_ERR_PARSE = 2,
  PP_ERR_NO_OSCILLATION = 3,
  PP_ERR_NUMERICAL = 4, /* step underflow, guard tripped, non-convergence */
  PP_ERR_DOMAIN = 6,
  PP_ERR_NOT_CLOSED = 7,
  PP_ERR_NO_SIGN_CHANGE = 8,
  PP_ERR_CONSERVATIVE = 9, /* closure defect vanishes on the whole bracket */
  PP_ERR_NO_ATTRACTOR = 10,
  PP_ERR_UNKNOWN_NAME = 11,
  PP_ERR_OUT_OF_RANGE = 12,
  PP_ERR_F2_ZERO = 13,
  PP_ERR_INTERNAL = 99
} pp_status;

typedef enum pp_verdict {
  PP_VERDICT_CLOSED = 0,
  PP_VERDICT_NOT_CLOSED = 1,
  PP_VERDICT_NO_OSCILLATION = 2
} pp_verdict;

typedef enum pp_period_method {
  PP_METHOD_SYMMETRIC = 0,
  PP_METHOD_TWO_BRANCH = 1,
  PP_METHOD_SHOOTING = 2
} pp_period_method;

typedef struct pp_system pp_system;
typedef struct pp_closure pp_closure;

typedef struct pp_options {
  double tol;         /* integration tolerance */
  double closure_tol; /* |defect| at or below this counts as closed */
} pp_options;

typedef struct pp_eval {
  double value;
  double d_x;
  double d_v;
  double d_xx;
  double d_xv;
  double d_vv;
} pp_eval;

typedef struct pp_closure_info {
  double amplitude;
  double lower_turning;
  double return_point;
  double defect;
  pp_verdict verdict;
} pp_closure_info;

typedef struct pp_period {
  double T;
  double omega;
  double err;
  pp_period_method method;
} pp_period;

PP_API const char* pp_version(void);
PP_API const char* pp_status_string(pp_status status);
/* Message of the last failed call on this thread ("" if none). */
PP_API const char* pp_last_error(void);
/* Byte offset of the last parse error on this thread, or -1. */
PP_API long pp_last_error_offset(void);
PP_API pp_options pp_options_default(void);
PP_API const char* pp_verdict_string(pp_verdict verdict);
PP_API const char* pp_method_string(pp_period_method method);

/* Systems */
PP_API pp_status pp_system_parse(const char* expression, pp_system** out);
PP_API pp_status pp_system_catalog(const char* name, const char* const* keys, const double* values,
                                   size_t count, pp_system** out);
PP_API void pp_system_free(pp_system* sys);
/* Copies the right-hand side as text; *needed receives the size including NUL.
   A short buffer receives a truncated, terminated copy and PP_ERR_OUT_OF_RANGE. */
PP_API pp_status pp_system_describe(const pp_system* sys, char* buffer, size_t capacity,
                                    size_t* needed);
/* Non-fatal catalog warning for the chosen parameters, or NULL. */
PP_API const char* pp_system_warning(const pp_system* sys);
PP_API int pp_system_is_separable(const pp_system* sys);
PP_API int pp_system_is_symmetric(const pp_system* sys, double scale);
PP_API pp_status pp_system_eval(const pp_system* sys, double x, double v, pp_eval* out);
PP_API pp_status pp_el_residual(const pp_system* sys, double x, double v, double* out);
/* Number of catalog entries and the name of entry i. */
PP_API size_t pp_catalog_size(void);
PP_API const char* pp_catalog_name(size_t index);

/* Phase-plane reduction */
PP_API pp_status pp_closure_compute(const pp_system* sys, double amplitude,
                                    const pp_options* options, pp_closure** out);
PP_API void pp_closure_free(pp_closure* closure);
PP_API pp_status pp_closure_get_info(const pp_closure* closure, pp_closure_info* out);
/* u = v^2 on the branch with the given velocity sign (+1 or -1).
   PP_ERR_OUT_OF_RANGE when x lies outside that branch. */
PP_API pp_status pp_closure_branch_u(const pp_closure* closure, int velocity_sign, double x,
                                     double* u);
PP_API pp_status pp_closure_period(const pp_closure* closure, double tol, pp_period* out);
PP_API pp_status pp_find_limit_cycle(const pp_system* sys, double amplitude_lo,
                                     double amplitude_hi, double tol, const pp_options* options,
                                     double* amplitude);

/* Quarter-period formula; phi from the reduction branch through (A, 0). */
PP_API pp_status pp_period_symmetric(const pp_system* sys, double amplitude,
                                     const pp_options* options, double quad_tol, pp_period* out);
/* Quarter-period formula; phi from the product-form inversion. */
PP_API pp_status pp_period_symmetric_separable(const pp_system* sys, double amplitude,
                                               double quad_tol, pp_period* out);

/* Time-domain oracle */
PP_API pp_status pp_oracle_period(const pp_system* sys, double amplitude, double tol,
                                  double* period, double* return_amplitude);
PP_API pp_status pp_oracle_steady(const pp_system* sys, double x0, double tol, double* amplitude,
                                  double* period);

#ifdef __cplusplus
}
#endif

#endif /* PHASEPLANE_H */
