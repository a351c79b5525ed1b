#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace phaseplane {

enum class Variable { x, v };
enum class Function { neg, sin, cos, tan, exp, log, sqrt, abs, tanh };
enum class BinaryOp { add, sub, mul, div, pow };

/// Immutable expression tree over the position x and the velocity v.
/// Copies share structure; a tree is never mutated after construction.
class Expr {
 public:
  enum class Kind { constant, variable, unary, binary };

  static Expr constant(double value);
  static Expr variable(Variable var);
  static Expr unary(Function fn, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  Kind kind() const;
  double value() const;        // constant
  Variable var() const;        // variable
  Function function() const;   // unary
  BinaryOp op() const;         // binary
  const Expr& operand() const; // unary
  const Expr& lhs() const;     // binary
  const Expr& rhs() const;     // binary

  bool uses(Variable var) const;

  /// Fully parenthesized text form. Parsing it yields a structurally equal tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses `source` into an expression tree.
///
/// Grammar (lowest to highest precedence):
///   sum     := product (('+' | '-') product)*
///   product := power (('*' | '/') power)*
///   power   := unary ('^' power)?          right-associative
///   unary   := '-' unary | primary
///   primary := number | 'x' | 'v' | 'pi' | 'e' | name '(' sum ')' | '(' sum ')'
///
/// Unary minus binds tighter than the base of '^', so "-x^2" is (-x)^2.
/// Throws Error(ErrorCode::parse) carrying the byte offset of the problem.
Expr parse(std::string_view source);

struct EvalResult {
  double value = 0.0;
  double d_x = 0.0;
  double d_v = 0.0;
  double d_xx = 0.0;
  double d_xv = 0.0;
  double d_vv = 0.0;
};

/// Value plus first and second partials, by second-order dual arithmetic.
/// Throws Error(ErrorCode::domain) naming the offending sub-expression.
EvalResult eval_full(const Expr& e, double x, double v);

/// Value only. Bit-identical to eval_full(e, x, v).value.
double eval(const Expr& e, double x, double v);

const char* to_string(Function fn);

}  // namespace phaseplane
