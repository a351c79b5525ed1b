#include <cmath>
#include <string>

#include "doctest.h"
#include "errors.hpp"
#include "expr.hpp"
#include "random_expr.hpp"

using namespace phaseplane;

namespace {

Expr num(double c) { return Expr::constant(c); }
Expr X() { return Expr::variable(Variable::x); }
Expr V() { return Expr::variable(Variable::v); }
Expr bin(BinaryOp op, Expr a, Expr b) { return Expr::binary(op, std::move(a), std::move(b)); }

std::size_t parse_error_offset(const std::string& source) {
  try {
    parse(source);
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::parse);
    REQUIRE(e.has_offset());
    return e.offset();
  }
  FAIL("no parse error for '" << source << "'");
  return 0;
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
  CHECK(parse("-x*(1+v^2)") ==
        bin(BinaryOp::mul, Expr::unary(Function::neg, X()),
            bin(BinaryOp::add, num(1), bin(BinaryOp::pow, V(), num(2)))));
  CHECK(parse("x") == X());
  CHECK(parse("sin(x)+v") == bin(BinaryOp::add, Expr::unary(Function::sin, X()), V()));
  CHECK(parse("  x  ") == X());
}

TEST_CASE("operator precedence and associativity") {
  CHECK(parse("2^3^2") == bin(BinaryOp::pow, num(2), bin(BinaryOp::pow, num(3), num(2))));
  CHECK(eval(parse("2^3^2"), 0, 0) == 512.0);
  // Unary minus binds to the base before exponentiation.
  CHECK(parse("-x^2") == bin(BinaryOp::pow, Expr::unary(Function::neg, X()), num(2)));
  CHECK(eval(parse("-x^2"), 3, 0) == 9.0);
  CHECK(eval(parse("1-2-3"), 0, 0) == -4.0);
  CHECK(eval(parse("8/4/2"), 0, 0) == 1.0);
  CHECK(eval(parse("1+2*3"), 0, 0) == 7.0);
  CHECK(eval(parse("(1+2)*3"), 0, 0) == 9.0);
  CHECK(eval(parse("--x"), 2, 0) == 2.0);
}

TEST_CASE("numbers, constants and functions") {
  CHECK(eval(parse("1.5e2"), 0, 0) == 150.0);
  CHECK(eval(parse("2.5E-1"), 0, 0) == 0.25);
  CHECK(eval(parse(".5"), 0, 0) == 0.5);
  CHECK(eval(parse("pi"), 0, 0) == doctest::Approx(std::acos(-1.0)).epsilon(1e-16));
  CHECK(eval(parse("e"), 0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-16));
  CHECK(eval(parse("sqrt(abs(-4))"), 0, 0) == 2.0);
  CHECK(eval(parse("exp(log(3))"), 0, 0) == doctest::Approx(3.0));
  CHECK(eval(parse("tanh(0)+tan(0)+cos(0)"), 0, 0) == 1.0);
}

TEST_CASE("syntax errors carry byte offsets") {
  CHECK(parse_error_offset("x++") == 2);
  CHECK(parse_error_offset("(x") == 2);
  CHECK(parse_error_offset("x)") == 1);
  CHECK(parse_error_offset("1 +") == 3);
  CHECK(parse_error_offset("sin x") == 4);
  CHECK(parse_error_offset("x $ v") == 2);
  CHECK_THROWS_AS(parse(""), Error);
  CHECK_THROWS_AS(parse("   "), Error);
  try {
    parse("y + 1");
    FAIL("unknown identifier accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    CHECK(std::string(e.what()).find("y") != std::string::npos);
  }
}

TEST_CASE("eval_full on the worked points") {
  const Expr mickens = parse("-x*(1+v^2)");
  EvalResult r = eval_full(mickens, 1, 0);
  CHECK(r.value == -1.0);
  CHECK(r.d_x == -1.0);
  CHECK(r.d_v == 0.0);
  CHECK(r.d_vv == -2.0);

  r = eval_full(mickens, 1, 1);
  CHECK(r.value == -2.0);
  CHECK(r.d_x == -2.0);
  CHECK(r.d_v == -2.0);
  const double h = 1e-6;
  CHECK(r.d_x == doctest::Approx((eval(mickens, 1 + h, 1) - eval(mickens, 1 - h, 1)) / (2 * h))
                     .epsilon(1e-6));
  CHECK(r.d_v == doctest::Approx((eval(mickens, 1, 1 + h) - eval(mickens, 1, 1 - h)) / (2 * h))
                     .epsilon(1e-6));

  r = eval_full(parse("-x"), 3, 5);
  CHECK(r.value == -3.0);
  CHECK(r.d_x == -1.0);
  CHECK(r.d_v == 0.0);
}

TEST_CASE("second partials by hand") {
  const EvalResult r = eval_full(parse("x^2*v^3 + sin(x*v)"), 0.5, 2.0);
  const double xv = 1.0;
  CHECK(r.d_xx == doctest::Approx(2 * 8 - 4 * std::sin(xv)));
  CHECK(r.d_xv == doctest::Approx(2 * 0.5 * 3 * 4 + std::cos(xv) - xv * std::sin(xv)));
  CHECK(r.d_vv == doctest::Approx(0.25 * 6 * 2 - 0.25 * std::sin(xv)));
}

TEST_CASE("domain errors name the offending node") {
  for (const char* src : {"log(x)", "sqrt(x-1)", "1/x", "x^-0.5"}) {
    CAPTURE(src);
    try {
      eval_full(parse(src), 0.0, 0.0);
      FAIL("no domain error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain);
    }
  }
  try {
    eval(parse("1 + log(x-2)"), 1.0, 0.0);
    FAIL("no domain error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
}

TEST_CASE("random expressions: partials match central differences") {
  testing::RandomExpr gen(20240611);
  for (int i = 0; i < 300; ++i) {
    const Expr e = gen.make(4);
    const double x = gen.coordinate();
    const double v = gen.coordinate();
    CAPTURE(e.to_string());
    CAPTURE(x);
    CAPTURE(v);
    const EvalResult r = eval_full(e, x, v);
    const double h = 1e-6;
    const double fd_x = (eval(e, x + h, v) - eval(e, x - h, v)) / (2 * h);
    const double fd_v = (eval(e, x, v + h) - eval(e, x, v - h)) / (2 * h);
    CHECK(std::fabs(fd_x - r.d_x) <= 1e-5 * std::max(1.0, std::fabs(r.d_x)));
    CHECK(std::fabs(fd_v - r.d_v) <= 1e-5 * std::max(1.0, std::fabs(r.d_v)));
    // Second partials: differences of the exact first partials.
    const double fd_xx = (eval_full(e, x + h, v).d_x - eval_full(e, x - h, v).d_x) / (2 * h);
    const double fd_xv = (eval_full(e, x, v + h).d_x - eval_full(e, x, v - h).d_x) / (2 * h);
    const double fd_vv = (eval_full(e, x, v + h).d_v - eval_full(e, x, v - h).d_v) / (2 * h);
    CHECK(std::fabs(fd_xx - r.d_xx) <= 1e-3 * std::max(1.0, std::fabs(r.d_xx)));
    CHECK(std::fabs(fd_xv - r.d_xv) <= 1e-3 * std::max(1.0, std::fabs(r.d_xv)));
    CHECK(std::fabs(fd_vv - r.d_vv) <= 1e-3 * std::max(1.0, std::fabs(r.d_vv)));
  }
}

TEST_CASE("print and parse round trip") {
  testing::RandomExpr gen(7);
  for (int i = 0; i < 500; ++i) {
    const Expr once = parse(gen.make(5).to_string());
    const Expr twice = parse(once.to_string());
    CHECK(once == twice);
    CHECK(once.to_string() == twice.to_string());
  }
  for (const char* src : {"-x*(1+v^2)", "2^3^2", "-x^2", "(1-x^2)*v - x", "1e+20*x", "0.1*v",
                          "sin(cos(tan(x)))/exp(v)", "-(-(x))"}) {
    CAPTURE(src);
    const Expr e = parse(src);
    CHECK(parse(e.to_string()) == e);
  }
}

TEST_CASE("evaluation is deterministic and consistent") {
  testing::RandomExpr gen(99);
  for (int i = 0; i < 200; ++i) {
    const Expr e = gen.make(4);
    const double x = gen.coordinate();
    const double v = gen.coordinate();
    const double a = eval(e, x, v);
    CHECK(a == eval(e, x, v));
    CHECK(a == eval_full(e, x, v).value);
  }
}

TEST_CASE("variable usage") {
  CHECK(parse("-x").uses(Variable::x));
  CHECK_FALSE(parse("-x").uses(Variable::v));
  CHECK(parse("(1-x^2)*v - x").uses(Variable::v));
}
