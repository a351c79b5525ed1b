#include "expr.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "jet.hpp"

namespace phaseplane {

struct Expr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  Variable var = Variable::x;
  Function fn = Function::neg;
  BinaryOp op = BinaryOp::add;
  Expr a{nullptr};
  Expr b{nullptr};
};

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Variable var) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var = var;
  return Expr(std::move(n));
}

Expr Expr::unary(Function fn, Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::unary;
  n->fn = fn;
  n->a = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::binary;
  n->op = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
Variable Expr::var() const { return node_->var; }
Function Expr::function() const { return node_->fn; }
BinaryOp Expr::op() const { return node_->op; }

const Expr& Expr::operand() const { return node_->a; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

bool Expr::uses(Variable var) const {
  switch (kind()) {
    case Kind::constant:
      return false;
    case Kind::variable:
      return this->var() == var;
    case Kind::unary:
      return operand().uses(var);
    case Kind::binary:
      return lhs().uses(var) || rhs().uses(var);
  }
  return false;
}

const char* to_string(Function fn) {
  switch (fn) {
    case Function::neg: return "-";
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::tan: return "tan";
    case Function::exp: return "exp";
    case Function::log: return "log";
    case Function::sqrt: return "sqrt";
    case Function::abs: return "abs";
    case Function::tanh: return "tanh";
  }
  return "?";
}

namespace {

const char* op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::pow: return "^";
  }
  return "?";
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

}  // namespace

std::string Expr::to_string() const {
  switch (kind()) {
    case Kind::constant:
      return format_number(value());
    case Kind::variable:
      return var() == Variable::x ? "x" : "v";
    case Kind::unary:
      if (function() == Function::neg) return "(-" + operand().to_string() + ")";
      return std::string(phaseplane::to_string(function())) + "(" +
             operand().to_string() + ")";
    case Kind::binary:
      return "(" + lhs().to_string() + " " + op_symbol(op()) + " " +
             rhs().to_string() + ")";
  }
  return {};
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::constant:
      return a.value() == b.value();
    case Expr::Kind::variable:
      return a.var() == b.var();
    case Expr::Kind::unary:
      return a.function() == b.function() && a.operand() == b.operand();
    case Expr::Kind::binary:
      return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    skip_space();
    if (pos_ == src_.size()) throw Error(ErrorCode::parse, "empty expression", 0);
    Expr e = parse_sum();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    throw Error(ErrorCode::parse,
                "syntax error at offset " + std::to_string(at) + ": " + what, at);
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (accept('+')) {
        e = Expr::binary(BinaryOp::add, e, parse_product());
      } else if (accept('-')) {
        e = Expr::binary(BinaryOp::sub, e, parse_product());
      } else {
        return e;
      }
    }
  }

  Expr parse_product() {
    Expr e = parse_power();
    for (;;) {
      if (accept('*')) {
        e = Expr::binary(BinaryOp::mul, e, parse_power());
      } else if (accept('/')) {
        e = Expr::binary(BinaryOp::div, e, parse_power());
      } else {
        return e;
      }
    }
  }

  Expr parse_power() {
    Expr base = parse_unary();
    if (accept('^')) return Expr::binary(BinaryOp::pow, base, parse_power());
    return base;
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::unary(Function::neg, parse_unary());
    return parse_primary();
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  Expr parse_primary() {
    skip_space();
    if (pos_ == src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      return parse_number();
    }
    if (is_ident_start(c)) return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    // An exponent needs at least one digit; otherwise 'e' is left for the caller.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      fail_at(start, "invalid number '" + std::string(first, last) + "'");
    }
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return Expr::variable(Variable::x);
    if (name == "v") return Expr::variable(Variable::v);
    if (name == "pi") return Expr::constant(3.141592653589793238462643383279502884);
    if (name == "e") return Expr::constant(2.718281828459045235360287471352662498);

    static constexpr struct {
      std::string_view name;
      Function fn;
    } kFunctions[] = {
        {"sin", Function::sin},   {"cos", Function::cos}, {"tan", Function::tan},
        {"exp", Function::exp},   {"log", Function::log}, {"sqrt", Function::sqrt},
        {"abs", Function::abs},   {"tanh", Function::tanh},
    };
    for (const auto& entry : kFunctions) {
      if (entry.name != name) continue;
      if (!accept('(')) fail("expected '(' after '" + std::string(name) + "'");
      Expr arg = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return Expr::unary(entry.fn, arg);
    }
    throw Error(ErrorCode::parse,
                "unknown identifier '" + std::string(name) + "' at offset " +
                    std::to_string(start),
                start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation. One template drives both the plain and the dual-number path so
// that the value component is computed by the same sequence of operations.

namespace {

[[noreturn]] void domain_error(const Expr& node, const std::string& what) {
  throw Error(ErrorCode::domain, what + " in '" + node.to_string() + "'");
}

double value_of(double a) { return a; }
double value_of(const Jet& a) { return a.val; }

double lift(double c, double) { return c; }
Jet lift(double c, const Jet&) { return Jet::constant(c); }

bool is_constant(double) { return true; }
bool is_constant(const Jet& a) {
  return a.dx == 0.0 && a.dv == 0.0 && a.dxx == 0.0 && a.dxv == 0.0 && a.dvv == 0.0;
}

double divide(double a, double b) { return a / b; }

Jet divide(const Jet& a, const Jet& b) {
  Jet q;
  const double inv = 1.0 / b.val;
  q.val = a.val / b.val;
  q.dx = (a.dx - q.val * b.dx) * inv;
  q.dv = (a.dv - q.val * b.dv) * inv;
  q.dxx = (a.dxx - 2.0 * q.dx * b.dx - q.val * b.dxx) * inv;
  q.dxv = (a.dxv - q.dx * b.dv - q.dv * b.dx - q.val * b.dxv) * inv;
  q.dvv = (a.dvv - 2.0 * q.dv * b.dv - q.val * b.dvv) * inv;
  return q;
}

// g, g', g'' of each named function, already domain-checked.
struct Derivs {
  double g0, g1, g2;
};

Derivs function_derivs(Function fn, double a) {
  switch (fn) {
    case Function::neg:
      return {-a, -1.0, 0.0};
    case Function::sin:
      return {std::sin(a), std::cos(a), -std::sin(a)};
    case Function::cos:
      return {std::cos(a), -std::sin(a), -std::cos(a)};
    case Function::tan: {
      const double t = std::tan(a);
      return {t, 1.0 + t * t, 2.0 * t * (1.0 + t * t)};
    }
    case Function::exp: {
      const double e = std::exp(a);
      return {e, e, e};
    }
    case Function::log:
      return {std::log(a), 1.0 / a, -1.0 / (a * a)};
    case Function::sqrt: {
      const double s = std::sqrt(a);
      return {s, 0.5 / s, -0.25 / (a * s)};
    }
    case Function::abs:
      return {std::fabs(a), a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0), 0.0};
    case Function::tanh: {
      const double t = std::tanh(a);
      return {t, 1.0 - t * t, -2.0 * t * (1.0 - t * t)};
    }
  }
  return {0.0, 0.0, 0.0};
}

double apply(Function fn, double a) {
  if (fn == Function::neg) return -a;
  return function_derivs(fn, a).g0;
}

Jet apply(Function fn, const Jet& a) {
  if (fn == Function::neg) return -a;
  const Derivs d = function_derivs(fn, a.val);
  return chain(a, d.g0, d.g1, d.g2);
}

template <typename T>
T integer_power(const T& base, long long n) {
  // Binary exponentiation; n >= 1.
  T result = base;
  T square = base;
  bool first = true;
  while (n > 0) {
    if (n & 1) {
      if (first) {
        result = square;
        first = false;
      } else {
        result = result * square;
      }
    }
    n >>= 1;
    if (n > 0) square = square * square;
  }
  return result;
}

template <typename T>
T evaluate(const Expr& e, const T& x, const T& v);

template <typename T>
T evaluate_pow(const Expr& node, const T& base, const T& exponent) {
  const double b = value_of(base);
  const double p = value_of(exponent);
  constexpr double kMaxIntegerExponent = 1e9;
  if (is_constant(exponent) && p == std::floor(p) && std::fabs(p) <= kMaxIntegerExponent) {
    const auto n = static_cast<long long>(p);
    if (n == 0) return lift(1.0, base);
    const T positive = integer_power(base, n < 0 ? -n : n);
    if (n > 0) return positive;
    if (value_of(positive) == 0.0) domain_error(node, "division by zero");
    return divide(lift(1.0, base), positive);
  }
  if (b < 0.0) domain_error(node, "negative base with non-integer exponent");
  if (b == 0.0) {
    if (!is_constant(exponent) || p < 0.0) domain_error(node, "zero base with non-integer exponent");
    return lift(0.0, base);
  }
  return apply(Function::exp, exponent * apply(Function::log, base));
}

template <typename T>
T evaluate(const Expr& e, const T& x, const T& v) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return lift(e.value(), x);
    case Expr::Kind::variable:
      return e.var() == Variable::x ? x : v;
    case Expr::Kind::unary: {
      const T a = evaluate(e.operand(), x, v);
      const double av = value_of(a);
      if (e.function() == Function::log && !(av > 0.0)) {
        domain_error(e, "log of non-positive argument");
      }
      if (e.function() == Function::sqrt && av < 0.0) {
        domain_error(e, "sqrt of negative argument");
      }
      return apply(e.function(), a);
    }
    case Expr::Kind::binary: {
      const T a = evaluate(e.lhs(), x, v);
      const T b = evaluate(e.rhs(), x, v);
      switch (e.op()) {
        case BinaryOp::add:
          return a + b;
        case BinaryOp::sub:
          return a - b;
        case BinaryOp::mul:
          return a * b;
        case BinaryOp::div:
          if (value_of(b) == 0.0) domain_error(e, "division by zero");
          return divide(a, b);
        case BinaryOp::pow:
          return evaluate_pow(e, a, b);
      }
    }
  }
  return lift(0.0, x);
}

}  // namespace

EvalResult eval_full(const Expr& e, double x, double v) {
  const Jet r = evaluate(e, Jet::var_x(x), Jet::var_v(v));
  return EvalResult{r.val, r.dx, r.dv, r.dxx, r.dxv, r.dvv};
}

double eval(const Expr& e, double x, double v) { return evaluate(e, x, v); }

}  // namespace phaseplane
