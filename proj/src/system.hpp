#pragma once

#include <optional>
#include <string>

#include "expr.hpp"
#include "separable.hpp"

namespace phaseplane {

/// The oscillator x'' = f(x, x'), with the velocity written as v.
class OscillatorSystem {
 public:
  explicit OscillatorSystem(Expr f, std::string description = {});
  /// Product form f = f1(x) * f2(v); keeps the factors for the separable route.
  explicit OscillatorSystem(SeparableSystem pair, std::string description = {});
  OscillatorSystem(Expr f, SeparableSystem pair, std::string description);

  static OscillatorSystem parse(const std::string& source);

  const Expr& rhs() const { return f_; }
  const std::optional<SeparableSystem>& separable() const { return pair_; }
  const std::string& description() const { return description_; }

  double f(double x, double v) const { return eval(f_, x, v); }
  EvalResult f_full(double x, double v) const { return eval_full(f_, x, v); }
  bool depends_on_velocity() const { return f_.uses(Variable::v); }

 private:
  Expr f_;
  std::optional<SeparableSystem> pair_;
  std::string description_;
};

/// Probes f(x, -v) = f(x, v) and f(-x, v) = -f(x, v) on a sample grid over
/// |x|, |v| <= scale. Used to pick the quarter-period formula automatically.
bool looks_symmetric(const OscillatorSystem& sys, double scale);

}  // namespace phaseplane
