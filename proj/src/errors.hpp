#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaseplane {

enum class ErrorCode {
  invalid_argument,
  parse,
  domain,
  no_oscillation,
  non_returning,
  step_underflow,
  guard_tripped,
  not_closed,
  no_sign_change,
  conservative_family,
  no_attractor,
  non_convergence,
  insufficient_events,
  unknown_name,
  out_of_range,
  f2_zero,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure in the library is reported as an Error carrying a code.
/// Parse errors additionally carry the byte offset of the offending token.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, const std::string& message, std::size_t offset)
      : std::runtime_error(message), code_(code), offset_(offset), has_offset_(true) {}

  ErrorCode code() const noexcept { return code_; }
  bool has_offset() const noexcept { return has_offset_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::size_t offset_ = 0;
  bool has_offset_ = false;
};

}  // namespace phaseplane
