#include "tvx/checks.hpp"

#include "tvx/genericity.hpp"
#include "tvx/localmodel.hpp"
#include "tvx/scenario.hpp"

namespace tvx {

namespace {

using Tag = Stratum::Tag;

void expect(std::vector<CheckResult>& out, std::string name, bool ok, std::string detail = {}) {
  out.push_back({std::move(name), ok, ok ? std::string() : std::move(detail)});
}

std::string first_point(const std::vector<std::string>& bad, std::size_t total) {
  if (bad.empty()) return {};
  return std::to_string(bad.size()) + " of " + std::to_string(total) + " mismatched, first " + bad.front();
}

void check_verdicts(std::vector<CheckResult>& out, const GenericityReport& r, Verdict expected) {
  expect(out, "verdicts " + to_string(expected) + "/" + to_string(expected),
         r.verdict_alpha == expected && r.verdict_beta == expected,
         "alpha " + to_string(r.verdict_alpha) + ", beta " + to_string(r.verdict_beta));
  expect(out, "nontransverse set = W union Wtilde over sample indices", r.identity_holds);
}

void check_r_bound(std::vector<CheckResult>& out, const GenericityReport& r, std::size_t expected) {
  expect(out, "r bound = " + std::to_string(expected), r.r_condition.bound == expected,
         "got " + std::to_string(r.r_condition.bound));
}

void example1(std::vector<CheckResult>& out, const GenericityReport& r) {
  std::vector<std::string> bad;
  for (const auto& p : r.points) {
    if (p.stratum.tag != Tag::W || p.delta_family != 1 || p.delta_slice != 1) bad.push_back(to_string(p.point));
  }
  expect(out, "every grid point is W with delta_family = delta_slice = 1", bad.empty(),
         first_point(bad, r.points.size()));
  check_verdicts(out, r, Verdict::Fails);
  check_r_bound(out, r, 1);
}

void example2(std::vector<CheckResult>& out, const GenericityReport& r) {
  std::vector<std::string> bad;
  for (const auto& p : r.points) {
    const bool on_axes = sgn(p.point.x[0]) == 0 || sgn(p.point.a[0]) == 0;
    const bool ok = on_axes ? p.stratum.tag == Tag::W && p.delta_family == 1 && p.delta_slice == 1
                            : p.stratum.tag == Tag::NotOnZ && p.delta_family == 0 && p.delta_slice == 0;
    if (!ok) bad.push_back(to_string(p.point));
  }
  expect(out, "W exactly where ax = 0, with delta 1 there and 0 elsewhere", bad.empty(),
         first_point(bad, r.points.size()));
  check_verdicts(out, r, Verdict::Fails);
  check_r_bound(out, r, 1);
}

void example3(std::vector<CheckResult>& out, const Scenario& s, const GenericityReport& r,
              std::size_t threads) {
  const auto& b = s.backend;
  const DefectReport half = classify(s.family, s.z, PointXA{{ratio(1, 2)}, {Rational(0)}}, b);
  expect(out, "(1/2, 0) is Wtilde(1) with delta_family = 1, delta_slice = 2",
         half.stratum == Stratum{Tag::Wtilde, 1} && half.delta_family == 1 && half.delta_slice == 2,
         "got " + half.stratum.to_string());

  // The exceptional parameter a = 0, sampled at x = k/100.
  std::vector<std::string> bad;
  bool w_seen = false;
  for (long k = -100; k <= 100; ++k) {
    const PointXA p{{ratio(k, 100)}, {Rational(0)}};
    const DefectReport d = classify(s.family, s.z, p, b);
    const bool inside = k > 0 && k < 100;
    const bool ok = inside ? d.delta_family == 1 && d.delta_slice == 2 : d.delta_family == 0 && d.delta_slice == 0;
    if (!ok) bad.push_back(to_string(p));
    w_seen = w_seen || d.stratum.tag == Tag::W;
  }
  expect(out, "on a = 0: delta_family = 1, delta_slice = 2 exactly for 0 < x < 1", bad.empty(),
         first_point(bad, 201));

  bool scan_w = false;
  for (const auto& p : r.points) scan_w = scan_w || p.stratum.tag == Tag::W;
  expect(out, "W is empty on the sampled points", !w_seen && !scan_w);

  const DefectReport origin = classify(s.family, s.z, PointXA{{Rational(0)}, {Rational(0)}}, b);
  const DefectReport near = classify(s.family, s.z, PointXA{{ratio(1, 100)}, {Rational(0)}}, b);
  expect(out, "delta_family = 1 accumulates at (0, 0) where delta_family = 0",
         near.delta_family == 1 && origin.delta_family == 0);

  const LocalModel model = build_local_model(s.family, s.z, PointXA{{ratio(1, 2)}, {Rational(0)}}, b);
  expect(out, "local model at (1/2, 0) is Q_POS_PARTIAL with Z~ = {y2 = 0}, dim 2",
         model.case_tag == LocalCase::QPosPartial && model.ztilde.zeroed() == std::vector<std::size_t>{2} &&
             model.ztilde_dim() == 2,
         "got " + to_string(model.case_tag));
  SamplingPlan grid = s.plan;
  grid.mode = SamplingMode::Grid;
  grid.x_count = 21;
  grid.a_count = 21;
  const LocalModelVerification v = verify_local_model(model, s.family, s.z, grid, b);
  expect(out, "local model verifies on a 21x21 grid", v.passed(),
         v.transversality.detail + v.containment.detail + v.defect_drop.detail + v.block_identity.detail);

  check_verdicts(out, r, Verdict::Holds);
  check_r_bound(out, r, 0);

  // With a = 0 on the grid the sampled sup reaches 1; the bound is still 0.
  SamplingPlan with_zero = s.plan;
  with_zero.a_count = 101;
  const auto full = scan(s.family, s.z, with_zero, b, {threads, false});
  expect(out, "delta sup over a grid containing a = 0 is 1 and the r bound stays 0",
         full.delta_sup_est == 1 && full.r_condition.bound == 0,
         "sup " + std::to_string(full.delta_sup_est) + ", bound " + std::to_string(full.r_condition.bound));
}

void parabola(std::vector<CheckResult>& out, const Scenario& s, const GenericityReport& r) {
  const auto& b = s.backend;
  const std::size_t expected_dim = s.family.n() + s.family.m() - (s.family.ell() - s.z.q());
  std::vector<std::string> bad_reg;
  std::vector<std::string> bad_dim;
  for (long k = -100; k <= 100; ++k) {
    const Rational x = ratio(k, 100);
    const PointXA p{{x}, {Rational(x * x)}};
    const Regularity reg = projection_regularity(s.family, s.z, p, b);
    if ((reg == Regularity::Critical) != (k == 0)) bad_reg.push_back(to_string(p));
    if (preimage_tangent<Rational>(s.family, s.z, p, b).cols() != expected_dim) bad_dim.push_back(to_string(p));
  }
  expect(out, "projection is critical exactly at (0, 0) among 201 preimage points", bad_reg.empty(),
         first_point(bad_reg, 201));
  expect(out, "preimage tangent has dimension n + m - (ell - q) at every sampled point", bad_dim.empty(),
         first_point(bad_dim, 201));
  check_verdicts(out, r, Verdict::Holds);
}

}  // namespace

std::vector<CheckResult> check_example(std::string_view name, std::size_t threads) {
  const Scenario s = builtin(name);
  const GenericityReport r = scan(s.family, s.z, s.plan, s.backend, {threads, true});
  std::vector<CheckResult> out;
  if (name == "example1") {
    example1(out, r);
  } else if (name == "example2") {
    example2(out, r);
  } else if (name == "example3") {
    example3(out, s, r, threads);
  } else if (name == "parabola") {
    parabola(out, s, r);
  }
  return out;
}

}  // namespace tvx
