#include "tvx/report.hpp"

#include <charconv>
#include <ctime>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

namespace tvx {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt(const Rational& v) { return to_string(v); }

const char* yes_no(bool b) { return b ? "true" : "false"; }

template <class T>
std::string format_matrix(const Matrix<T>& mat) {
  std::string out = "[";
  for (std::size_t i = 0; i < mat.rows(); ++i) {
    out += i == 0 ? "[" : ", [";
    for (std::size_t j = 0; j < mat.cols(); ++j) {
      if (j > 0) out += ", ";
      out += fmt(mat(i, j));
    }
    out += "]";
  }
  return out + "]";
}

std::string format_indices(const std::vector<std::size_t>& v) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + std::to_string(v[k]);
  return out + "]";
}

std::string format_interval(const std::vector<ClosedInterval>& box) {
  std::string out;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (i) out += " x ";
    out += "[" + to_string(box[i].lower) + ", " + to_string(box[i].upper) + "]";
  }
  return out;
}

void format_check(std::ostringstream& out, const char* name, const PropertyCheck& c) {
  out << name << " = " << (c.passed ? "pass" : "fail") << "\n";
  if (!c.passed) {
    out << name << ".detail = " << c.detail << "\n";
    if (c.counterexample) out << name << ".counterexample = " << to_string(*c.counterexample) << "\n";
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_defect(const DefectReport& r) {
  std::ostringstream out;
  out << "point = " << to_string(r.point) << "\n";
  out << "on_z = " << yes_no(r.on_z) << "\n";
  out << "delta_family = " << r.delta_family << "\n";
  out << "delta_slice = " << r.delta_slice << "\n";
  out << "sum_dim_family = " << r.sum_dim_family << "\n";
  out << "sum_dim_slice = " << r.sum_dim_slice << "\n";
  out << "stratum = " << r.stratum.to_string() << "\n";
  out << "mather_hypothesis = " << yes_no(r.mather_hypothesis) << "\n";
  if (r.membership_margin) out << "membership_margin = " << fmt(*r.membership_margin) << "\n";
  out << "jacobian = " << std::visit([](const auto& m) { return format_matrix(m); }, r.jacobian) << "\n";
  return out.str();
}

std::string format_local_model(const LocalModel& model) {
  std::ostringstream out;
  out << "base = " << to_string(model.base) << "\n";
  out << "case = " << to_string(model.case_tag) << "\n";
  out << "ell = " << model.ell << "\n";
  out << "q = " << model.q << "\n";
  out << "rho = " << model.rho << "\n";
  out << "row_permutation = " << format_indices(model.row_permutation) << "\n";
  out << "pivot_rows = " << model.pivot_rows << "\n";
  out << "ztilde.zeroed = " << format_indices(model.ztilde.zeroed()) << "\n";
  out << "ztilde.dim = " << model.ztilde_dim() << "\n";
  out << "utilde.half_width = " << to_string(model.half_width) << "\n";
  out << "utilde.shrink_steps = " << model.shrink_steps << "\n";
  if (model.rank_m3_base) out << "rank_m3_base = " << *model.rank_m3_base << "\n";
  return out.str();
}

std::string format_verification(const LocalModelVerification& v) {
  std::ostringstream out;
  out << "samples = " << v.samples << "\n";
  out << "samples_on_z = " << v.samples_on_z << "\n";
  out << "samples_outside_domain = " << v.samples_outside_domain << "\n";
  format_check(out, "dimension", v.dimension);
  format_check(out, "containment", v.containment);
  format_check(out, "transversality", v.transversality);
  format_check(out, "defect_drop", v.defect_drop);
  format_check(out, "block_identity", v.block_identity);
  out << "verified = " << yes_no(v.passed()) << "\n";
  return out.str();
}

std::string format_genericity(const GenericityReport& r, const SamplingPlan& plan) {
  std::ostringstream out;
  out << "seed = " << plan.seed << "\n";
  out << "mode = " << (plan.mode == SamplingMode::Grid ? "grid" : "monte_carlo") << "\n";
  out << "x_box = " << format_interval(plan.x_box) << "\n";
  out << "a_box = " << format_interval(plan.a_box) << "\n";
  out << "a_samples = " << r.a_samples << "\n";
  out << "a_samples_evaluated = " << r.a_samples_evaluated << "\n";
  out << "x_samples = " << r.x_samples << "\n";
  out << "points_evaluated = " << r.points_evaluated << "\n";
  out << "points_outside_domain = " << r.points_outside_domain << "\n";
  out << "freq_pi2_W = " << to_string(r.freq_pi2_w) << "\n";
  out << "freq_pi2_Wtilde = " << to_string(r.freq_pi2_wtilde) << "\n";
  out << "freq_nontransverse_slice = " << to_string(r.freq_nontransverse_slice) << "\n";
  out << "delta_sup_est = " << r.delta_sup_est << " (sampled lower bound over the boxes above)\n";
  out << "r_bound = " << r.r_condition.bound << "\n";
  out << "r_declared = "
      << (r.r_condition.declared_r ? std::to_string(*r.r_condition.declared_r) : std::string("inf")) << "\n";
  out << "r_condition = " << (r.r_condition.satisfied ? "satisfied" : "violated") << "\n";
  out << "eps_alpha = " << to_string(plan.eps_alpha) << "\n";
  out << "eps_beta = " << to_string(plan.eps_beta) << "\n";
  out << "verdict_alpha = " << to_string(r.verdict_alpha) << " (empirical)\n";
  out << "verdict_beta = " << to_string(r.verdict_beta) << " (empirical)\n";
  out << "agreement = " << yes_no(r.agreement) << "\n";
  out << "identity_nontransverse_eq_W_union_Wtilde = " << yes_no(r.identity_holds) << "\n";
  return out.str();
}

std::string defects_csv(const std::vector<DefectReport>& points, std::size_t n, std::size_t m) {
  std::ostringstream out;
  for (std::size_t i = 1; i <= n; ++i) out << "x" << i << ",";
  for (std::size_t j = 1; j <= m; ++j) out << "a" << j << ",";
  out << "on_z,delta_family,delta_slice,stratum\n";
  for (const auto& r : points) {
    for (const auto& v : r.point.x) out << to_string(v) << ",";
    for (const auto& v : r.point.a) out << to_string(v) << ",";
    out << yes_no(r.on_z) << "," << r.delta_family << "," << r.delta_slice << "," << r.stratum.to_string() << "\n";
  }
  return out.str();
}

std::string parameters_csv(const std::vector<ParameterFlags>& params, std::size_t m) {
  std::ostringstream out;
  out << "index,";
  for (std::size_t j = 1; j <= m; ++j) out << "a" << j << ",";
  out << "evaluated,in_W,in_Wtilde,nontransverse\n";
  for (const auto& p : params) {
    out << p.index << ",";
    for (const auto& v : p.a) out << to_string(v) << ",";
    out << p.evaluated << "," << yes_no(p.in_w) << "," << yes_no(p.in_wtilde) << "," << yes_no(p.nontransverse)
        << "\n";
  }
  return out.str();
}

std::string run_timestamp() {
  long long secs = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), secs);
    if (ec != std::errc() || ptr != s.data() + s.size()) secs = 0;
  }
  const std::time_t t = static_cast<std::time_t>(secs);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::filesystem::path write_run(const RunRecord& record, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory '" + out_dir.string() + "'" +
                  (ec ? ": " + ec.message() : std::string()));
  }

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("scenario.txt", record.scenario_text);
  if (record.genericity) {
    files.emplace_back("genericity.txt", format_genericity(*record.genericity, record.plan));
    files.emplace_back("defects.csv", defects_csv(record.genericity->points, record.n, record.m));
    files.emplace_back("parameters.csv", parameters_csv(record.genericity->parameters, record.m));
  }
  for (std::size_t k = 0; k < record.local_models.size(); ++k) {
    const auto& lm = record.local_models[k];
    std::string text = format_local_model(lm.model);
    if (lm.verification) text += format_verification(*lm.verification);
    files.emplace_back("local_model_" + std::to_string(k + 1) + ".txt", std::move(text));
  }

  std::ostringstream manifest;
  manifest << "scenario = " << record.scenario_name << "\n";
  manifest << "scenario_hash = " << record.scenario_hash << "\n";
  manifest << "tool_version = " << record.tool_version << "\n";
  manifest << "timestamp = " << record.timestamp << "\n";
  manifest << "genericity_reports = " << (record.genericity ? 1 : 0) << "\n";
  manifest << "local_models = " << record.local_models.size() << "\n";
  for (const auto& [name, body] : files) manifest << "file = " << name << "\n";

  for (const auto& [name, body] : files) write_file(out_dir / name, body);
  const auto path = out_dir / "manifest.txt";
  write_file(path, manifest.str());
  return path;
}

}  // namespace tvx
