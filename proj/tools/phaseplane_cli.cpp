// Command-line front end. Talks to the library only through the C API.

#include <phaseplane/phaseplane.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitNoOscillation = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitRelDiff = 5;

struct SystemDeleter {
  void operator()(pp_system* s) const { pp_system_free(s); }
};
struct ClosureDeleter {
  void operator()(pp_closure* c) const { pp_closure_free(c); }
};
using SystemPtr = std::unique_ptr<pp_system, SystemDeleter>;
using ClosurePtr = std::unique_ptr<pp_closure, ClosureDeleter>;

/// A failed library call, carrying the status and the library's message.
struct Failure {
  pp_status status;
  std::string message;
};

void check(pp_status status) {
  if (status != PP_OK) throw Failure{status, pp_last_error()};
}

int exit_code_for(pp_status status) {
  switch (status) {
    case PP_ERR_PARSE: return kExitParse;
    case PP_ERR_NO_OSCILLATION: return kExitNoOscillation;
    case PP_ERR_INVALID_ARGUMENT:
    case PP_ERR_UNKNOWN_NAME: return kExitUsage;
    default: return kExitNumerical;
  }
}

std::string fmt(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

json number(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

struct Options {
  std::string system;
  std::string catalog;
  std::vector<std::pair<std::string, double>> params;
  std::optional<double> amplitude;
  std::string amplitudes;
  double tol = 1e-10;
  double quad_tol = 1e-10;
  double closure_tol = 1e-6;
  double root_tol = 1e-9;
  std::string method = "auto";
  bool compare_oracle = false;
  std::optional<double> max_rel_diff;
  bool find_root = false;
  std::string out;
  std::string format;
  std::string report;
};

struct Range {
  double lo, hi;
  int n;
  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
      v.push_back(n == 1 ? lo : (i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1)));
    }
    return v;
  }
};

Range parse_range(const std::string& text) {
  Range r{};
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &r.lo, &r.hi, &r.n, &extra) != 3 || r.n < 1 ||
      !(r.lo > 0.0) || r.hi < r.lo || (r.n == 1 && r.hi != r.lo)) {
    throw Failure{PP_ERR_INVALID_ARGUMENT,
                  "--amplitudes expects lo:hi:n with 0 < lo <= hi and n >= 1, got '" + text + "'"};
  }
  return r;
}

SystemPtr make_system(const Options& o) {
  if (o.system.empty() == o.catalog.empty()) {
    throw Failure{PP_ERR_INVALID_ARGUMENT, "give exactly one of --system or --catalog"};
  }
  pp_system* raw = nullptr;
  if (!o.system.empty()) {
    if (!o.params.empty()) {
      throw Failure{PP_ERR_INVALID_ARGUMENT, "parameters apply to --catalog systems only"};
    }
    check(pp_system_parse(o.system.c_str(), &raw));
  } else {
    std::vector<const char*> keys;
    std::vector<double> values;
    for (const auto& [k, v] : o.params) {
      keys.push_back(k.c_str());
      values.push_back(v);
    }
    check(pp_system_catalog(o.catalog.c_str(), keys.data(), values.data(), keys.size(), &raw));
  }
  SystemPtr sys(raw);
  if (const char* w = pp_system_warning(sys.get())) std::cerr << "warning: " << w << "\n";
  return sys;
}

std::string describe(const pp_system* sys) {
  size_t needed = 0;
  check(pp_system_describe(sys, nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(pp_system_describe(sys, text.data(), text.size(), &needed));
  text.resize(needed - 1);
  return text;
}

pp_options lib_options(const Options& o) {
  pp_options opt = pp_options_default();
  opt.tol = o.tol;
  opt.closure_tol = o.closure_tol;
  return opt;
}

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Failure{PP_ERR_INVALID_ARGUMENT, "cannot open '" + path + "' for writing"};
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;  // numbers or strings

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      json arr = json::array();
      for (const auto& row : rows) {
        json obj = json::object();
        for (size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
        arr.push_back(obj);
      }
      os << arr.dump(2) << "\n";
      return;
    }
    for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "");
        if (row[i].is_string()) {
          os << row[i].get<std::string>();
        } else if (row[i].is_null()) {
          os << "nan";
        } else {
          os << fmt(row[i].get<double>());
        }
      }
      os << "\n";
    }
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
      arr.push_back(obj);
    }
    return arr;
  }
};

double require_amplitude(const Options& o) {
  if (!o.amplitude) throw Failure{PP_ERR_INVALID_ARGUMENT, "--amplitude is required"};
  return *o.amplitude;
}

Range require_range(const Options& o) {
  if (o.amplitudes.empty()) throw Failure{PP_ERR_INVALID_ARGUMENT, "--amplitudes is required"};
  return parse_range(o.amplitudes);
}

// ---------------------------------------------------------------------------

struct PeriodResult {
  pp_period period;
  std::optional<double> oracle_T;
  std::optional<double> rel_diff;
};

pp_period_method choose_method(const Options& o, const pp_system* sys, double A) {
  if (o.method == "symmetric") return PP_METHOD_SYMMETRIC;
  if (o.method == "two-branch") return PP_METHOD_TWO_BRANCH;
  return pp_system_is_symmetric(sys, A) ? PP_METHOD_SYMMETRIC : PP_METHOD_TWO_BRANCH;
}

PeriodResult compute_period(const Options& o, const pp_system* sys, double A) {
  const pp_options opt = lib_options(o);
  PeriodResult r{};
  if (choose_method(o, sys, A) == PP_METHOD_SYMMETRIC) {
    check(pp_period_symmetric(sys, A, &opt, o.quad_tol, &r.period));
  } else {
    pp_closure* raw = nullptr;
    check(pp_closure_compute(sys, A, &opt, &raw));
    ClosurePtr closure(raw);
    check(pp_closure_period(closure.get(), o.quad_tol, &r.period));
  }
  if (o.compare_oracle) {
    double T = 0.0;
    check(pp_oracle_period(sys, A, o.tol, &T, nullptr));
    r.oracle_T = T;
    r.rel_diff = std::fabs(r.period.T - T) / T;
  }
  return r;
}

bool exceeds(const Options& o, const PeriodResult& r) {
  return o.max_rel_diff && r.rel_diff && *r.rel_diff > *o.max_rel_diff;
}

json cmd_reduce(const Options& o, const pp_system* sys, int& exit_code) {
  const double A = require_amplitude(o);
  const pp_options opt = lib_options(o);
  pp_closure* raw = nullptr;
  check(pp_closure_compute(sys, A, &opt, &raw));
  ClosurePtr closure(raw);
  pp_closure_info info{};
  check(pp_closure_get_info(closure.get(), &info));
  if (info.verdict == PP_VERDICT_NO_OSCILLATION) {
    throw Failure{PP_ERR_NO_OSCILLATION, "orbit does not return to a second turning point"};
  }
  const double lo = std::min(info.lower_turning, info.return_point);
  const double hi = std::max(info.lower_turning, info.return_point);
  constexpr int kPoints = 1001;
  Table table{{"x", "u_lower", "u_upper", "phi_lower", "phi_upper"}, {}};
  for (int i = 0; i < kPoints; ++i) {
    const double x = i == kPoints - 1 ? hi : lo + (hi - lo) * i / (kPoints - 1);
    double u_lower = NAN;
    double u_upper = NAN;
    if (pp_closure_branch_u(closure.get(), -1, x, &u_lower) != PP_OK) u_lower = NAN;
    if (pp_closure_branch_u(closure.get(), 1, x, &u_upper) != PP_OK) u_upper = NAN;
    table.rows.push_back({x, number(u_lower), number(u_upper), number(-std::sqrt(u_lower)),
                          number(std::sqrt(u_upper))});
  }
  Output out(o.out);
  table.write(out.stream(), o.format.empty() ? "csv" : o.format);
  exit_code = 0;
  return json{{"closure",
               {{"A", info.amplitude},
                {"x_L", info.lower_turning},
                {"x_R", number(info.return_point)},
                {"defect", number(info.defect)},
                {"verdict", pp_verdict_string(info.verdict)}}},
              {"rows", kPoints}};
}

json period_json(const PeriodResult& r) {
  json j = {{"T", r.period.T},
            {"omega", r.period.omega},
            {"err", r.period.err},
            {"method", pp_method_string(r.period.method)}};
  if (r.oracle_T) j["oracle_T"] = *r.oracle_T;
  if (r.rel_diff) j["rel_diff"] = *r.rel_diff;
  return j;
}

json cmd_period(const Options& o, const pp_system* sys, int& exit_code) {
  const double A = require_amplitude(o);
  const PeriodResult r = compute_period(o, sys, A);
  const json j = period_json(r);
  Output out(o.out);
  if (o.format == "csv") {
    Table t{{"T", "omega", "err", "method"}, {{r.period.T, r.period.omega, r.period.err,
                                                pp_method_string(r.period.method)}}};
    if (r.oracle_T) {
      t.columns.insert(t.columns.end(), {"oracle_T", "rel_diff"});
      t.rows[0].insert(t.rows[0].end(), {*r.oracle_T, *r.rel_diff});
    }
    t.write(out.stream(), "csv");
  } else {
    out.stream() << j.dump(2) << "\n";
  }
  exit_code = exceeds(o, r) ? kExitRelDiff : 0;
  if (exit_code) std::cerr << "rel_diff " << fmt(*r.rel_diff) << " exceeds --max-rel-diff\n";
  return j;
}

json cmd_closure(const Options& o, const pp_system* sys, int& exit_code) {
  const Range range = require_range(o);
  const pp_options opt = lib_options(o);
  Table table{{"A", "x_L", "x_R", "defect", "verdict"}, {}};
  for (double A : range.values()) {
    pp_closure* raw = nullptr;
    const pp_status st = pp_closure_compute(sys, A, &opt, &raw);
    if (st == PP_ERR_NO_OSCILLATION) {
      table.rows.push_back({A, nullptr, nullptr, nullptr, "no-oscillation"});
      continue;
    }
    check(st);
    ClosurePtr closure(raw);
    pp_closure_info info{};
    check(pp_closure_get_info(closure.get(), &info));
    table.rows.push_back({A, info.lower_turning, number(info.return_point), number(info.defect),
                          pp_verdict_string(info.verdict)});
  }
  json result = {{"rows", table.to_json()}};
  {
    Output out(o.out);
    table.write(out.stream(), o.format.empty() ? "csv" : o.format);
  }
  if (o.find_root) {
    double root = 0.0;
    check(pp_find_limit_cycle(sys, range.lo, range.hi, o.root_tol, &opt, &root));
    pp_closure* raw = nullptr;
    check(pp_closure_compute(sys, root, &opt, &raw));
    ClosurePtr closure(raw);
    pp_closure_info info{};
    check(pp_closure_get_info(closure.get(), &info));
    json summary = {{"root", root},
                    {"defect_at_root", info.defect},
                    {"verdict_at_root", pp_verdict_string(info.verdict)},
                    {"bracket", {range.lo, range.hi}},
                    {"root_tol", o.root_tol}};
    pp_period period{};
    if (info.verdict == PP_VERDICT_CLOSED &&
        pp_closure_period(closure.get(), o.quad_tol, &period) == PP_OK) {
      summary["T"] = period.T;
      summary["omega"] = period.omega;
    }
    std::cout << summary.dump() << "\n";
    result["root"] = summary;
  }
  exit_code = 0;
  return result;
}

json cmd_sweep(const Options& o, const pp_system* sys, int& exit_code) {
  const Range range = require_range(o);
  Table table{{"A", "T", "omega", "err"}, {}};
  if (o.compare_oracle) table.columns.insert(table.columns.end(), {"oracle_T", "rel_diff"});
  exit_code = 0;
  for (double A : range.values()) {
    const PeriodResult r = compute_period(o, sys, A);
    std::vector<json> row = {A, r.period.T, r.period.omega, r.period.err};
    if (o.compare_oracle) row.insert(row.end(), {*r.oracle_T, *r.rel_diff});
    table.rows.push_back(std::move(row));
    if (exceeds(o, r)) {
      std::cerr << "A = " << fmt(A) << ": rel_diff " << fmt(*r.rel_diff)
                << " exceeds --max-rel-diff\n";
      exit_code = kExitRelDiff;
    }
  }
  Output out(o.out);
  table.write(out.stream(), o.format.empty() ? "csv" : o.format);
  return {{"rows", table.to_json()}};
}

// Leftover "--name value" / "--name=value" pairs become catalog parameters.
std::vector<std::pair<std::string, double>> parse_params(const std::vector<std::string>& extra) {
  std::vector<std::pair<std::string, double>> params;
  for (size_t i = 0; i < extra.size(); ++i) {
    const std::string& arg = extra[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3) {
      throw Failure{PP_ERR_INVALID_ARGUMENT, "unexpected argument '" + arg + "'"};
    }
    std::string name = arg.substr(2);
    std::string value;
    if (auto eq = name.find('='); eq != std::string::npos) {
      value = name.substr(eq + 1);
      name = name.substr(0, eq);
    } else if (i + 1 < extra.size()) {
      value = extra[++i];
    } else {
      throw Failure{PP_ERR_INVALID_ARGUMENT, "parameter --" + name + " needs a value"};
    }
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size()) {
      throw Failure{PP_ERR_INVALID_ARGUMENT, "parameter --" + name + ": '" + value +
                                                 "' is not a number"};
    }
    params.emplace_back(name, v);
  }
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-plane reduction, amplitude-period quadrature and periodic-orbit detection "
               "for oscillators x'' = f(x, v)."};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--system", o.system, "right-hand side f(x, v) as an expression");
    sub->add_option("--catalog", o.catalog,
                    "built-in oscillator: harmonic, mickens, duffing, vanderpol, damped-linear; "
                    "parameters follow as --NAME VALUE");
    sub->add_option("--tol", o.tol, "integration tolerance (default 1e-10)");
    sub->add_option("--quad-tol", o.quad_tol, "quadrature tolerance (default 1e-10)");
    sub->add_option("--closure-tol", o.closure_tol,
                    "largest |defect| still reported as closed (default 1e-6)");
    sub->add_option("--out", o.out, "write data to PATH instead of stdout");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--report", o.report, "also write a JSON run report to PATH");
    sub->allow_extras();
  };
  auto add_period_flags = [&o](CLI::App* sub) {
    sub->add_option("--method", o.method, "auto, symmetric or two-branch (default auto)")
        ->check(CLI::IsMember({"auto", "symmetric", "two-branch"}));
    sub->add_flag("--compare-oracle", o.compare_oracle,
                  "also measure the period by direct time integration");
    sub->add_option("--max-rel-diff", o.max_rel_diff,
                    "exit 5 when the oracle relative difference exceeds this");
  };

  CLI::App* reduce = app.add_subcommand("reduce", "tabulate u = v^2 on both branches");
  add_common(reduce);
  reduce->add_option("--amplitude", o.amplitude, "starting turning point A > 0");

  CLI::App* period = app.add_subcommand("period", "period of the orbit through (A, 0)");
  add_common(period);
  add_period_flags(period);
  period->add_option("--amplitude", o.amplitude, "starting turning point A > 0");

  CLI::App* closure = app.add_subcommand("closure", "closure defect across amplitudes");
  add_common(closure);
  closure->add_option("--amplitudes", o.amplitudes, "lo:hi:n");
  closure->add_flag("--find-root", o.find_root, "locate the limit-cycle amplitude in [lo, hi]");
  closure->add_option("--root-tol", o.root_tol, "defect tolerance for --find-root (default 1e-9)");

  CLI::App* sweep = app.add_subcommand("sweep", "amplitude-period curve");
  add_common(sweep);
  add_period_flags(sweep);
  sweep->add_option("--amplitudes", o.amplitudes, "lo:hi:n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CLI::App* active = app.get_subcommands().front();
  try {
    o.params = parse_params(active->remaining());
    if (!(o.tol > 0.0) || !(o.quad_tol > 0.0) || !(o.closure_tol >= 0.0) || !(o.root_tol > 0.0)) {
      throw Failure{PP_ERR_INVALID_ARGUMENT, "tolerances must be positive"};
    }
    const SystemPtr sys = make_system(o);
    int exit_code = 0;
    json results;
    if (active == reduce) {
      results = cmd_reduce(o, sys.get(), exit_code);
    } else if (active == period) {
      results = cmd_period(o, sys.get(), exit_code);
    } else if (active == closure) {
      results = cmd_closure(o, sys.get(), exit_code);
    } else {
      results = cmd_sweep(o, sys.get(), exit_code);
    }
    if (!o.report.empty()) {
      std::ostringstream command;
      for (int i = 0; i < argc; ++i) command << (i ? " " : "") << argv[i];
      json amplitudes = o.amplitude ? json(*o.amplitude) : json(o.amplitudes);
      json report = {
          {"command", command.str()},
          {"system", {{"expression", describe(sys.get())}, {"catalog", o.catalog}}},
          {"amplitudes", amplitudes},
          {"tolerances",
           {{"tol", o.tol}, {"quad_tol", o.quad_tol}, {"closure_tol", o.closure_tol}}},
          {"results", results},
          {"wall_time_s",
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
      std::ofstream f(o.report);
      if (!f) throw Failure{PP_ERR_INVALID_ARGUMENT, "cannot write report '" + o.report + "'"};
      f << report.dump(2) << "\n";
    }
    return exit_code;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return exit_code_for(f.status);
  }
}
