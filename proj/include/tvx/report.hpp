#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tvx/defect.hpp"
#include "tvx/genericity.hpp"
#include "tvx/localmodel.hpp"
#include "tvx/sampling.hpp"

namespace tvx {

// Structured-text reports are "key = value" lines in a fixed order, so equal
// inputs give equal bytes.

std::string format_defect(const DefectReport& r);
std::string format_local_model(const LocalModel& model);
std::string format_verification(const LocalModelVerification& v);
/// Verdicts carry an "(empirical)" suffix; the δ estimate names its box.
std::string format_genericity(const GenericityReport& r, const SamplingPlan& plan);

/// One row per classified point: coordinates, on_z, delta_family,
/// delta_slice, stratum.
std::string defects_csv(const std::vector<DefectReport>& points, std::size_t n, std::size_t m);
/// One row per a-sample with its flags.
std::string parameters_csv(const std::vector<ParameterFlags>& params, std::size_t m);

struct LocalModelRecord {
  LocalModel model;
  std::optional<LocalModelVerification> verification;
};

struct RunRecord {
  std::string scenario_name;
  std::string scenario_hash;
  std::string scenario_text;  // canonical form
  std::string tool_version;
  std::string timestamp;
  std::size_t n = 0;
  std::size_t m = 0;
  SamplingPlan plan;
  std::optional<GenericityReport> genericity;
  std::vector<LocalModelRecord> local_models;
};

/// UTC ISO-8601 time from SOURCE_DATE_EPOCH, or the epoch when unset, so
/// repeated runs write identical files.
std::string run_timestamp();

/// Writes manifest.txt, scenario.txt and the reports into out_dir (created if
/// needed, existing files overwritten). Returns the manifest path. Throws
/// IoError naming the path that failed.
std::filesystem::path write_run(const RunRecord& record, const std::filesystem::path& out_dir);

}  // namespace tvx
