#include "errors.hpp"

namespace phaseplane {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::no_oscillation: return "no oscillation";
    case ErrorCode::non_returning: return "non-returning branch";
    case ErrorCode::step_underflow: return "step size underflow";
    case ErrorCode::guard_tripped: return "guard tripped";
    case ErrorCode::not_closed: return "orbit not closed";
    case ErrorCode::no_sign_change: return "no sign change in bracket";
    case ErrorCode::conservative_family: return "closure defect identically zero";
    case ErrorCode::no_attractor: return "no periodic attractor";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::insufficient_events: return "insufficient events";
    case ErrorCode::unknown_name: return "unknown name";
    case ErrorCode::out_of_range: return "out of range";
    case ErrorCode::f2_zero: return "f2 vanishes";
  }
  return "unknown error";
}

}  // namespace phaseplane
