#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tvx/geometry.hpp"
#include "tvx/linalg.hpp"
#include "tvx/sampling.hpp"

namespace tvx {

struct Scenario {
  std::string name;
  ParamFamily family;
  SubmanifoldSpec z;
  SamplingPlan plan;
  ScalarBackend backend;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses the line-oriented scenario format:
///
///   name = <identifier>
///   [dims]     n, m, ell, r (positive integer or "inf")
///   [family]   F1 .. F<ell> = <expr over x, a>
///   [domain]   x<i> / a<j> = (lo, hi) with "-inf"/"inf" allowed;
///              predicate = <expr>  (required > 0, repeatable)
///   [z]        kind = slice | levelset; zeroed = i, j, ...;
///              g = <expr over y> (repeatable); constraint = <expr> (repeatable, > 0)
///   [plan]     seed, mode = grid | monte_carlo, x<i> / a<j> = [lo, hi],
///              x_count, a_count (default 21), eps_alpha, eps_beta
///   [backend]  kind = exact | float; rank_tol, mem_tol (float only)
///
/// '#' starts a comment. Numbers are "p/q" rationals or decimals. Throws
/// ValidationError naming "<origin>:<line>" for syntax problems and the
/// offending field for semantic ones.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>");

/// Reads and parses a scenario file; throws IoError if it cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario(serialize(s)) == s.
std::string serialize(const Scenario& s);

/// "sha256:<hex>" of the canonical form, so whitespace and comment edits do
/// not change it.
std::string content_hash(const Scenario& s);

const std::vector<std::string>& builtin_names();

/// Source text of a built-in scenario. Throws ValidationError for unknown names.
std::string_view builtin_source(std::string_view name);

/// Built-ins go through parse_scenario like any file.
Scenario builtin(std::string_view name);

}  // namespace tvx
