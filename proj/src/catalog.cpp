#include "catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "errors.hpp"

namespace phaseplane {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed-form";
    case Provenance::published_formula: return "published-formula";
    case Provenance::oracle_fixture: return "oracle-fixture";
  }
  return "?";
}

const std::vector<LimitCycleFixture>& vanderpol_fixtures() {
  // steady_amplitude(vanderpol(mu), x0 = 0.5, tol = 1e-12); see tests/test_catalog.cpp.
  static const std::vector<LimitCycleFixture> fixtures = {
      {1.0, 2.008619860874, 6.663286859322},
      {0.1, 2.000103979866, 6.287111272289},
  };
  return fixtures;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"harmonic",
       "x'' = -x",
       {},
       {{"u(x)", "A^2 - x^2", Provenance::closed_form, "integrate du/dx = -2x from u(A) = 0"},
        {"T", "2*pi", Provenance::closed_form, "isochronous linear oscillator"}}},
      {"mickens",
       "x'' = -x (1 + v^s)",
       {{"s", 2.0, "velocity exponent (positive integer; even keeps v-parity)"}},
       {{"u(x) for s = 2", "exp(A^2 - x^2) - 1", Provenance::published_formula,
         "separable route: (1/2) ln(1 + phi^2) = (A^2 - x^2) / 2"},
        {"T for s = 2", "4 * int_0^A dx / sqrt(exp(A^2 - x^2) - 1)",
         Provenance::published_formula, "quarter-period quadrature of the exact phi"}}},
      {"duffing",
       "x'' = -alpha x - beta x^3",
       {{"alpha", 1.0, "linear stiffness"}, {"beta", 1.0, "cubic stiffness"}},
       {{"u(x)", "alpha (A^2 - x^2) + (beta / 2) (A^4 - x^4)", Provenance::closed_form,
         "u = 2 int_A^x f(s) ds"},
        {"T", "4 K(k) / sqrt(alpha + beta A^2), k^2 = beta A^2 / (2 (alpha + beta A^2))",
         Provenance::closed_form, "quarter period of the quartic energy integral, alpha + beta A^2 > 0"}}},
      {"vanderpol",
       "x'' = mu (1 - x^2) v - x",
       {{"mu", 1.0, "nonlinear damping strength"}},
       {{"limit-cycle amplitude, mu = 1", "2.008619860874", Provenance::oracle_fixture,
         "steady_amplitude from x0 = 0.5 at tol 1e-12"},
        {"limit-cycle period, mu = 1", "6.663286859322", Provenance::oracle_fixture,
         "steady_amplitude from x0 = 0.5 at tol 1e-12"},
        {"limit-cycle amplitude, mu = 0.1", "2.000103979866", Provenance::oracle_fixture,
         "steady_amplitude from x0 = 0.5 at tol 1e-12"},
        {"limit-cycle period, mu = 0.1", "6.287111272289", Provenance::oracle_fixture,
         "steady_amplitude from x0 = 0.5 at tol 1e-12"}}},
      {"damped-linear",
       "x'' = -x - c v",
       {{"c", 0.1, "linear damping coefficient"}},
       {{"return amplitude", "< A for c > 0", Provenance::closed_form,
         "energy decays at rate c v^2"}}},
  };
  return entries;
}

const CatalogEntry& catalog_entry(std::string_view name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return e;
  }
  throw Error(ErrorCode::unknown_name, "unknown catalog entry '" + std::string(name) + "'");
}

namespace {

std::string number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, end);
  return value < 0.0 ? "(" + s + ")" : s;
}

// "c*m", or just "m" when c == 1.
std::string scaled(double c, const std::string& monomial) {
  return c == 1.0 ? monomial : number(c) + "*" + monomial;
}

std::vector<double> resolve(const CatalogEntry& entry, const ParameterList& params) {
  std::vector<double> values;
  for (const auto& p : entry.parameters) values.push_back(p.default_value);
  for (const auto& [key, value] : params) {
    auto it = std::find_if(entry.parameters.begin(), entry.parameters.end(),
                           [&key = key](const CatalogParameter& p) { return p.name == key; });
    if (it == entry.parameters.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "catalog entry '" + entry.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::invalid_argument, "parameter '" + key + "' must be finite");
    }
    values[static_cast<std::size_t>(it - entry.parameters.begin())] = value;
  }
  return values;
}

}  // namespace

OscillatorSystem catalog_get(std::string_view name, const ParameterList& params) {
  const CatalogEntry& entry = catalog_entry(name);
  const std::vector<double> p = resolve(entry, params);

  if (name == "harmonic") {
    return OscillatorSystem(parse("-x"), SeparableSystem(parse("-x"), parse("1")), "-x");
  }
  if (name == "mickens") {
    const double s = p[0];
    if (!(s >= 1.0) || s != std::floor(s)) {
      throw Error(ErrorCode::invalid_argument, "mickens exponent s must be a positive integer");
    }
    const std::string f2 = "1+v^" + number(s);
    const std::string f = "-x*(" + f2 + ")";
    return OscillatorSystem(parse(f), SeparableSystem(parse("-x"), parse(f2)), f);
  }
  if (name == "duffing") {
    const std::string f = "-" + scaled(p[0], "x") + " - " + scaled(p[1], "x^3");
    return OscillatorSystem(parse(f), SeparableSystem(parse(f), parse("1")), f);
  }
  if (name == "vanderpol") {
    const std::string f = scaled(p[0], "(1-x^2)*v") + " - x";
    return OscillatorSystem(parse(f), f);
  }
  // damped-linear
  const std::string f = "-x - " + scaled(p[0], "v");
  return OscillatorSystem(parse(f), f);
}

std::vector<std::string> catalog_warnings(std::string_view name, const ParameterList& params) {
  std::vector<std::string> out;
  if (name != "mickens") return out;
  const std::vector<double> p = resolve(catalog_entry(name), params);
  if (std::fmod(p[0], 2.0) == 1.0) {
    out.push_back("odd mickens exponent is experimental: f is no longer even in v");
  }
  return out;
}

std::optional<std::function<double(double, double)>> catalog_exact_u(std::string_view name,
                                                                      const ParameterList& params,
                                                                      double A) {
  const std::vector<double> p = resolve(catalog_entry(name), params);
  if (name == "harmonic") {
    return [A](double x, double d) { return d * (A + x); };
  }
  if (name == "mickens" && p[0] == 2.0) {
    return [A](double x, double d) { return std::expm1(d * (A + x)); };
  }
  if (name == "duffing") {
    const double alpha = p[0];
    const double beta = p[1];
    return [A, alpha, beta](double x, double d) {
      const double q = d * (A + x);  // A^2 - x^2
      return alpha * q + 0.5 * beta * q * (A * A + x * x);
    };
  }
  return std::nullopt;
}

}  // namespace phaseplane
