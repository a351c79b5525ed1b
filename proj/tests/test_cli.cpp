#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PHASEPLANE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

using Row = std::vector<std::string>;

std::vector<Row> csv(const std::string& text, std::size_t skip_after = 0) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '{') continue;
    Row row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  (void)skip_after;
  return rows;
}

double num(const std::string& s) { return std::stod(s); }

std::size_t column(const Row& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("reduce") {
  Run r = run("reduce --system \"-x\" --amplitude 1");
  REQUIRE(r.status == 0);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 1002);
  CHECK(rows[0] == Row{"x", "u_lower", "u_upper", "phi_lower", "phi_upper"});
  // Grid runs over [x_L, 1] with x_L = -1 to within the integration tolerance,
  // so the middle row sits at x = 0 up to that tolerance.
  CHECK(std::fabs(num(rows[501][0])) <= 1e-9);
  CHECK(std::fabs(num(rows[501][4]) - 1.0) <= 1e-8);
  CHECK(std::fabs(num(rows[501][3]) + 1.0) <= 1e-8);

  r = run("reduce --catalog mickens --amplitude 1");
  REQUIRE(r.status == 0);
  rows = csv(r.out);
  CHECK(std::fabs(num(rows[501][4]) - std::sqrt(std::exp(1.0) - 1.0)) <= 1e-8);

  r = run("reduce --catalog mickens --amplitude 1 --format json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 1001);
  CHECK(j[500].contains("phi_upper"));

  CHECK(run("reduce --system \"x\" --amplitude 1").status == 3);
}

TEST_CASE("period") {
  Run r = run("period --catalog harmonic --amplitude 1");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(std::fabs(j["T"].get<double>() - kTwoPi) <= 1e-8);
  CHECK(j["omega"].get<double>() == doctest::Approx(1.0));
  CHECK(j["err"].get<double>() >= 0.0);
  CHECK(j["method"] == "symmetric-quadrature");
  CHECK_FALSE(j.contains("oracle_T"));

  for (const char* name : {"mickens", "duffing"}) {
    r = run(std::string("period --catalog ") + name + " --amplitude 1 --compare-oracle");
    REQUIRE(r.status == 0);
    j = nlohmann::json::parse(r.out);
    CAPTURE(name);
    CHECK(j["rel_diff"].get<double>() <= 1e-6);
    CHECK(j.contains("oracle_T"));
  }

  r = run("period --catalog vanderpol --mu 1 --amplitude 2.0086198609 --compare-oracle");
  REQUIRE(r.status == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["method"] == "two-branch-quadrature");
  CHECK(j["rel_diff"].get<double>() <= 1e-3);

  r = run("period --catalog mickens --amplitude 1 --method two-branch");
  REQUIRE(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["method"] == "two-branch-quadrature");

  // An impossible threshold exits 5 but still prints the result.
  r = run("period --catalog mickens --amplitude 1 --compare-oracle --max-rel-diff 0");
  CHECK(r.status == 5);
  CHECK(nlohmann::json::parse(r.out).contains("rel_diff"));

  CHECK(run("period --catalog damped-linear --amplitude 1").status == 4);
}

TEST_CASE("closure") {
  Run r = run("closure --catalog harmonic --amplitudes 0.5:2:4");
  REQUIRE(r.status == 0);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == Row{"A", "x_L", "x_R", "defect", "verdict"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][4] == "closed");
    CHECK(std::fabs(num(rows[i][3])) <= 1e-8);
  }

  r = run("closure --catalog damped-linear --amplitudes 1:1:1");
  REQUIRE(r.status == 0);
  rows = csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][4] == "not-closed");

  r = run("closure --catalog vanderpol --mu 1 --amplitudes 1:3:21 --find-root");
  REQUIRE(r.status == 0);
  rows = csv(r.out);
  CHECK(rows.size() == 22);
  const std::string last = r.out.substr(r.out.rfind('{'));
  const auto j = nlohmann::json::parse(last);
  CHECK(std::fabs(j["root"].get<double>() - 2.008619860874) <= 1e-4);

  r = run("closure --system \"x\" --amplitudes 1:2:2");
  REQUIRE(r.status == 0);
  rows = csv(r.out);
  CHECK(rows[1][4] == "no-oscillation");
}

TEST_CASE("sweep") {
  Run r = run("sweep --catalog harmonic --amplitudes 0.1:10:5");
  REQUIRE(r.status == 0);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == Row{"A", "T", "omega", "err"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::fabs(num(rows[i][1]) - kTwoPi) <= 1e-8);

  r = run("sweep --catalog mickens --amplitudes 0.5:2:4");
  REQUIRE(r.status == 0);
  rows = csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Run single = run("period --catalog mickens --amplitude " + rows[i][0]);
    REQUIRE(single.status == 0);
    const auto j = nlohmann::json::parse(single.out);
    char expected[40];
    std::snprintf(expected, sizeof expected, "%.17g", j["T"].get<double>());
    CHECK(rows[i][1] == expected);
  }

  r = run("sweep --catalog mickens --amplitudes 0.5:2:4 --compare-oracle");
  REQUIRE(r.status == 0);
  rows = csv(r.out);
  const std::size_t rd = column(rows[0], "rel_diff");
  column(rows[0], "oracle_T");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(num(rows[i][rd]) <= 1e-6);
}

TEST_CASE("output files and run report") {
  const auto dir = std::filesystem::temp_directory_path() / "phaseplane_cli_test";
  std::filesystem::create_directories(dir);
  const auto out = dir / "sweep.csv";
  const auto report = dir / "report.json";
  const Run r = run("sweep --catalog harmonic --amplitudes 1:2:2 --out " + out.string() +
                    " --report " + report.string());
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  CHECK(header == "A,T,omega,err");
  std::ifstream rf(report);
  const auto j = nlohmann::json::parse(rf);
  CHECK(j.contains("command"));
  CHECK(j["system"]["expression"].get<std::string>().find("x") != std::string::npos);
  CHECK(j["tolerances"]["tol"].get<double>() == 1e-10);
  CHECK(j["results"]["rows"].size() == 2);
  CHECK(j["wall_time_s"].get<double>() >= 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("usage errors and exit codes") {
  CHECK(run("").status == 1);
  CHECK(run("period --amplitude 1").status == 1);
  CHECK(run("period --system \"-x\" --catalog harmonic --amplitude 1").status == 1);
  CHECK(run("period --catalog nope --amplitude 1").status == 1);
  CHECK(run("period --catalog mickens --s 2.5 --amplitude 1").status == 1);
  CHECK(run("period --catalog vanderpol --bogus 1 --amplitude 1").status == 1);
  CHECK(run("period --system \"x++\" --amplitude 1").status == 2);
  CHECK(run("period --system \"-x\"").status == 1);
  CHECK(run("closure --system \"-x\" --amplitudes 2:1:3").status == 1);
  CHECK(run("period --system \"-x\" --amplitude 1 --format xml").status == 1);
  CHECK(run("--help").status == 0);
  CHECK(run("period --catalog vanderpol --mu=0.5 --amplitude 2 --method two-branch").status == 4);
}
