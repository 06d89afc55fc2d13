#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tvx {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the documented assertions for a built-in scenario (strata over its
/// grid, verdicts, r-bound, and the example-specific facts). Throws
/// ValidationError for unknown names.
std::vector<CheckResult> check_example(std::string_view name, std::size_t threads = 0);

}  // namespace tvx
