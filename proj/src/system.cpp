#include "system.hpp"

#include <cmath>

#include "errors.hpp"

namespace phaseplane {

OscillatorSystem::OscillatorSystem(Expr f, std::string description)
    : f_(std::move(f)), description_(std::move(description)) {
  if (description_.empty()) description_ = f_.to_string();
}

OscillatorSystem::OscillatorSystem(SeparableSystem pair, std::string description)
    : OscillatorSystem(Expr::binary(BinaryOp::mul, pair.f1(), pair.f2()), pair,
                       std::move(description)) {}

OscillatorSystem::OscillatorSystem(Expr f, SeparableSystem pair, std::string description)
    : f_(std::move(f)), pair_(std::move(pair)), description_(std::move(description)) {
  if (description_.empty()) description_ = f_.to_string();
}

OscillatorSystem OscillatorSystem::parse(const std::string& source) {
  return OscillatorSystem(phaseplane::parse(source), source);
}

bool looks_symmetric(const OscillatorSystem& sys, double scale) {
  constexpr int kSamples = 7;
  for (int i = 1; i <= kSamples; ++i) {
    for (int j = 0; j <= kSamples; ++j) {
      const double x = scale * (0.13 + 0.87 * i / kSamples);
      const double v = scale * (0.11 + 0.89 * j / kSamples);
      try {
        const double f = sys.f(x, v);
        const double tol = 1e-12 * std::max(1.0, std::fabs(f));
        if (std::fabs(sys.f(x, -v) - f) > tol) return false;
        if (std::fabs(sys.f(-x, v) + f) > tol) return false;
      } catch (const Error&) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace phaseplane
