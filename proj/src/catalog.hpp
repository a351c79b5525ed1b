#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "system.hpp"

namespace phaseplane {

enum class Provenance {
  closed_form,        // exact solution derived by hand
  published_formula,  // exact formula known from the literature on the oscillator
  oracle_fixture,     // frozen output of the time-domain oracle
};
const char* to_string(Provenance p);

struct ReferenceFact {
  std::string quantity;
  std::string value;  // formula or number, as text
  Provenance provenance;
  std::string recipe;  // how to recompute it
};

struct CatalogParameter {
  std::string name;
  double default_value;
  std::string meaning;
};

struct CatalogEntry {
  std::string name;
  std::string summary;
  std::vector<CatalogParameter> parameters;
  std::vector<ReferenceFact> facts;
};

using ParameterList = std::vector<std::pair<std::string, double>>;

const std::vector<CatalogEntry>& catalog();

/// Throws Error(unknown_name) for names outside the catalog.
const CatalogEntry& catalog_entry(std::string_view name);

/// Instantiates a catalog oscillator. Unlisted or invalid parameters throw
/// Error(invalid_argument).
OscillatorSystem catalog_get(std::string_view name, const ParameterList& params = {});

/// Warnings for parameter choices that are accepted but leave the tested
/// regime (e.g. an odd Mickens exponent). Empty when none apply.
std::vector<std::string> catalog_warnings(std::string_view name, const ParameterList& params);

/// Exact u(x) = phi(x)^2 on the orbit through (A, 0), for entries that have
/// one. The function receives x and the exact distance A - x.
std::optional<std::function<double(double x, double dist_to_A)>> catalog_exact_u(
    std::string_view name, const ParameterList& params, double A);

/// Frozen oracle values for the van der Pol limit cycle.
struct LimitCycleFixture {
  double mu;
  double amplitude;
  double period;
};
const std::vector<LimitCycleFixture>& vanderpol_fixtures();

}  // namespace phaseplane
