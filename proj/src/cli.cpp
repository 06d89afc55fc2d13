#include "tvx/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "tvx/checks.hpp"
#include "tvx/genericity.hpp"
#include "tvx/localmodel.hpp"
#include "tvx/report.hpp"
#include "tvx/scenario.hpp"

namespace tvx {

namespace {

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string scenario_path;
  std::string builtin_name;
  std::string backend;
  std::optional<double> rank_tol;
  std::optional<double> mem_tol;
  std::string point;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> x_count;
  std::optional<std::size_t> a_count;
  std::size_t threads = 0;
  std::string out_dir;
  bool verify = false;
  std::size_t verify_grid = 21;
  std::string example;
  bool check = false;
};

void add_source(CLI::App* sub, Options& o) {
  auto* s = sub->add_option("--scenario", o.scenario_path, "Scenario file");
  auto* b = sub->add_option("--builtin", o.builtin_name, "Built-in scenario name");
  s->excludes(b);
  sub->add_option("--backend", o.backend, "Override the backend")->check(CLI::IsMember({"exact", "float"}));
  sub->add_option("--rank-tol", o.rank_tol, "Relative rank tolerance (float backend)");
  sub->add_option("--mem-tol", o.mem_tol, "Membership tolerance (float backend)");
}

void add_point(CLI::App* sub, Options& o) {
  sub->add_option("--point", o.point, "Point x1,..,xn,a1,..,am (rationals or decimals)")->required();
}

void add_plan(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Override the plan seed");
  sub->add_option("--x-count", o.x_count, "Override the x sample count");
  sub->add_option("--a-count", o.a_count, "Override the a sample count");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

Scenario load(const Options& o) {
  if (o.scenario_path.empty() && o.builtin_name.empty()) {
    throw UsageError("one of --scenario or --builtin is required");
  }
  Scenario s = o.scenario_path.empty() ? builtin(o.builtin_name) : load_scenario(o.scenario_path);

  const std::string kind = o.backend.empty() ? s.backend.name() : o.backend;
  if (kind == "exact") {
    if (o.rank_tol || o.mem_tol) throw ValidationError("backend", "the exact backend takes no tolerances");
    if (s.family.uses_functions() || s.z.uses_functions()) {
      throw ValidationError("backend", "sin/cos/exp/log need the float backend");
    }
    s.backend = ScalarBackend::exact();
  } else {
    FloatTolerances tol = s.backend.is_exact() ? FloatTolerances{} : s.backend.tolerances();
    if (o.rank_tol) tol.rank_rel = *o.rank_tol;
    if (o.mem_tol) tol.membership = *o.mem_tol;
    s.backend = ScalarBackend::floating(tol);
  }

  if (o.seed) s.plan.seed = *o.seed;
  if (o.x_count) s.plan.x_count = *o.x_count;
  if (o.a_count) s.plan.a_count = *o.a_count;
  validate_plan(s.plan, s.family.domain());
  return s;
}

PointXA point_of(const Options& o, const Scenario& s) {
  const std::size_t want = s.family.n() + s.family.m();
  const std::size_t got = static_cast<std::size_t>(std::count(o.point.begin(), o.point.end(), ',')) + 1;
  if (got != want) {
    throw UsageError("point: expected " + std::to_string(want) + " coordinates (n + m), got " +
                     std::to_string(got));
  }
  return parse_point(o.point, s.family.n(), s.family.m());
}

std::filesystem::path output_root(const Options& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("TVX_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "tvx-runs";
}

int cmd_delta(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const PointXA p = point_of(o, s);
  out << "point = " << to_string(p) << "\n";
  out << "delta_family = " << delta_family(s.family, s.z, p, s.backend) << "\n";
  out << "delta_slice = " << delta_slice(s.family, s.z, p, s.backend) << "\n";
  out << "transverse_family = " << (is_transverse_at(MapKind::Family, s.family, s.z, p, s.backend) ? "true" : "false")
      << "\n";
  out << "transverse_slice = " << (is_transverse_at(MapKind::Slice, s.family, s.z, p, s.backend) ? "true" : "false")
      << "\n";
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  out << format_defect(classify(s.family, s.z, point_of(o, s), s.backend));
  return kExitOk;
}

int cmd_scan(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  RunRecord record;
  record.scenario_name = s.name;
  record.scenario_hash = content_hash(s);
  record.scenario_text = serialize(s);
  record.tool_version = TVX_VERSION;
  record.timestamp = run_timestamp();
  record.n = s.family.n();
  record.m = s.family.m();
  record.plan = s.plan;
  record.genericity = scan(s.family, s.z, s.plan, s.backend, {o.threads, true});
  const auto manifest = write_run(record, output_root(o) / s.name);
  out << "scenario = " << s.name << "\n";
  out << "scenario_hash = " << record.scenario_hash << "\n";
  out << "manifest = " << manifest.string() << "\n";
  out << format_genericity(*record.genericity, s.plan);
  return kExitOk;
}

int cmd_local_model(const Options& o, std::ostream& out, bool verify) {
  const Scenario s = load(o);
  const PointXA p = point_of(o, s);
  const LocalModel model = build_local_model(s.family, s.z, p, s.backend);
  out << format_local_model(model);
  if (!verify) return kExitOk;
  SamplingPlan grid = s.plan;
  grid.mode = SamplingMode::Grid;
  grid.x_count = o.verify_grid;
  grid.a_count = o.verify_grid;
  const LocalModelVerification v = verify_local_model(model, s.family, s.z, grid, s.backend);
  out << format_verification(v);
  return v.passed() ? kExitOk : kExitDomain;
}

int cmd_regularity(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const PointXA p = point_of(o, s);
  const Regularity r = projection_regularity(s.family, s.z, p, s.backend);
  const std::size_t dim = s.backend.is_exact() ? preimage_tangent<Rational>(s.family, s.z, p, s.backend).cols()
                                               : preimage_tangent<double>(s.family, s.z, p, s.backend).cols();
  out << "point = " << to_string(p) << "\n";
  out << "preimage_tangent_dim = " << dim << "\n";
  out << "regularity = " << to_string(r) << "\n";
  return kExitOk;
}

int cmd_sup(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  out << "delta_sup_est = " << delta_sup_estimate(s.family, s.z, s.plan, s.backend) << "\n";
  out << "note = sampled lower bound for the supremum over U\n";
  return kExitOk;
}

int cmd_examples(const Options& o, std::ostream& out) {
  std::vector<std::string> names;
  if (o.example.empty()) {
    names = builtin_names();
  } else {
    builtin_source(o.example);  // rejects unknown names
    names.push_back(o.example);
  }
  if (!o.check) {
    for (const auto& n : names) {
      if (o.example.empty()) {
        out << n << "\n";
      } else {
        out << builtin_source(n);
      }
    }
    return kExitOk;
  }
  bool all = true;
  for (const auto& n : names) {
    for (const auto& c : check_example(n, o.threads)) {
      out << (c.passed ? "PASS " : "FAIL ") << n << ": " << c.name;
      if (!c.passed && !c.detail.empty()) out << " (" << c.detail << ")";
      out << "\n";
      all = all && c.passed;
    }
  }
  return all ? kExitOk : kExitDomain;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transversality defects, local models and genericity scans", "tvx"};
  app.set_version_flag("--version", std::string(TVX_VERSION));
  app.require_subcommand(1);
  Options o;

  auto* delta = app.add_subcommand("delta", "Family and slice defects at a point");
  add_source(delta, o);
  add_point(delta, o);

  auto* cls = app.add_subcommand("classify", "Full defect report and stratum at a point");
  add_source(cls, o);
  add_point(cls, o);

  auto* scn = app.add_subcommand("scan", "Genericity scan; writes a run directory");
  add_source(scn, o);
  add_plan(scn, o);
  scn->add_option("--out", o.out_dir, "Output root (default $TVX_OUT_DIR or tvx-runs)");

  auto* lm = app.add_subcommand("local-model", "Build the local model at a point");
  add_source(lm, o);
  add_point(lm, o);
  lm->add_flag("--verify", o.verify, "Also verify the model on a grid in U~");
  lm->add_option("--grid", o.verify_grid, "Verification points per axis")->check(CLI::PositiveNumber);

  auto* vl = app.add_subcommand("verify-local", "Build and verify the local model at a point");
  add_source(vl, o);
  add_point(vl, o);
  vl->add_option("--grid", o.verify_grid, "Verification points per axis")->check(CLI::PositiveNumber);

  auto* reg = app.add_subcommand("regularity", "Regularity of the parameter projection on F^-1(Z)");
  add_source(reg, o);
  add_point(reg, o);

  auto* ex = app.add_subcommand("examples", "List, print or check the built-in scenarios");
  ex->add_option("--name", o.example, "Built-in scenario name");
  ex->add_flag("--check", o.check, "Run the example's assertions");
  ex->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* sup = app.add_subcommand("sup", "Sampled estimate of sup delta_family");
  add_source(sup, o);
  add_plan(sup, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*delta) return cmd_delta(o, out);
    if (*cls) return cmd_classify(o, out);
    if (*scn) return cmd_scan(o, out);
    if (*lm) return cmd_local_model(o, out, o.verify);
    if (*vl) return cmd_local_model(o, out, true);
    if (*reg) return cmd_regularity(o, out);
    if (*ex) return cmd_examples(o, out);
    if (*sup) return cmd_sup(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace tvx
