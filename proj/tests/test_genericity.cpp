#include <doctest.h>

#include <set>

#include "tvx/genericity.hpp"
#include "tvx/report.hpp"
#include "tvx/scenario.hpp"

using namespace tvx;

namespace {

const auto exact = ScalarBackend::exact();

PointXA pt(Rational x, Rational a) { return PointXA{{std::move(x)}, {std::move(a)}}; }

GenericityReport run(const Scenario& s, std::size_t threads = 1) {
  return scan(s.family, s.z, s.plan, s.backend, {threads, true});
}

}  // namespace

TEST_CASE("built-in verdicts") {
  const auto e1 = run(builtin("example1"));
  CHECK(e1.freq_pi2_w == 1);
  CHECK(e1.verdict_alpha == Verdict::Fails);
  CHECK(e1.verdict_beta == Verdict::Fails);
  CHECK(e1.a_samples == 101);
  CHECK(e1.points_evaluated == 101 * 101);

  const auto e2 = run(builtin("example2"));
  CHECK(e2.freq_pi2_w == 1);  // x = 0 lies in every a-slice
  CHECK(e2.verdict_alpha == Verdict::Fails);

  const auto e3 = run(builtin("example3"));
  CHECK(e3.freq_pi2_w == 0);
  CHECK(e3.verdict_alpha == Verdict::Holds);
  CHECK(e3.verdict_beta == Verdict::Holds);

  const auto pb = run(builtin("parabola"));
  CHECK(pb.verdict_alpha == Verdict::Holds);
  CHECK(pb.verdict_beta == Verdict::Holds);
  for (const auto* r : {&e1, &e2, &e3, &pb}) {
    CHECK(r->identity_holds);
    CHECK(r->agreement);
  }
}

TEST_CASE("identity (nontransverse = W union Wtilde) recomputed from the points") {
  auto s = builtin("example3");
  s.plan.a_count = 101;  // include the exceptional parameter
  const auto r = run(s, 3);
  std::set<std::size_t> w, wt, nt;
  const std::size_t per_a = r.x_samples;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    const std::size_t a_index = i / per_a;
    if (p.stratum.tag == Stratum::Tag::W) w.insert(a_index);
    if (p.stratum.tag == Stratum::Tag::Wtilde) wt.insert(a_index);
    if (p.delta_slice > 0) nt.insert(a_index);
  }
  std::set<std::size_t> both = w;
  both.insert(wt.begin(), wt.end());
  CHECK(both == nt);
  CHECK(std::vector<std::size_t>(nt.begin(), nt.end()) == r.flagged_nontransverse);
  CHECK(r.flagged_wtilde == std::vector<std::size_t>{50});
  CHECK(r.freq_pi2_wtilde == ratio(1, 101));
  CHECK(r.verdict_beta == Verdict::Fails);
  CHECK(r.verdict_alpha == Verdict::Holds);
  CHECK_FALSE(r.agreement);  // a single exceptional parameter is visible on this grid
}

TEST_CASE("thresholds") {
  auto s = builtin("example3");
  s.plan.a_count = 101;
  s.plan.eps_beta = ratio(1, 100);
  const auto r = run(s);
  CHECK(r.verdict_beta == Verdict::Holds);
  CHECK(r.agreement);
}

TEST_CASE("r-condition arithmetic") {
  CHECK(run(builtin("example1")).r_condition.bound == 1);
  CHECK(run(builtin("example2")).r_condition.bound == 1);
  CHECK(run(builtin("example3")).r_condition.bound == 0);
  auto s = builtin("example1");
  s.family = ParamFamily(1, 1, s.family.components(), s.family.domain(), 1U);
  const auto r = run(s);
  CHECK(r.r_condition.declared_r == 1U);
  CHECK_FALSE(r.r_condition.satisfied);
  s.family = ParamFamily(1, 1, s.family.components(), s.family.domain(), 2U);
  CHECK(run(s).r_condition.satisfied);
}

TEST_CASE("scan output does not depend on the thread count") {
  auto s = builtin("example2");
  s.plan.mode = SamplingMode::MonteCarlo;
  s.plan.x_count = 300;
  s.plan.a_count = 40;
  const auto one = run(s, 1);
  for (std::size_t t : {2U, 5U, 16U}) {
    const auto many = run(s, t);
    CHECK(format_genericity(one, s.plan) == format_genericity(many, s.plan));
    CHECK(defects_csv(one.points, 1, 1) == defects_csv(many.points, 1, 1));
    CHECK(parameters_csv(one.parameters, 1) == parameters_csv(many.parameters, 1));
  }
}

TEST_CASE("points outside U are skipped; an empty scan is inconclusive") {
  auto s = builtin("example1");
  DomainSpec d = s.family.domain();
  d.predicates = {parse_expr("x1 - 2")};
  s.family = ParamFamily(1, 1, s.family.components(), d, std::nullopt);
  const auto r = run(s);
  CHECK(r.points_evaluated == 0);
  CHECK(r.points_outside_domain == 101 * 101);
  CHECK(r.a_samples_evaluated == 0);
  CHECK(r.verdict_alpha == Verdict::Inconclusive);
  CHECK(r.verdict_beta == Verdict::Inconclusive);

  d.predicates = {parse_expr("x1")};
  s.family = ParamFamily(1, 1, s.family.components(), d, std::nullopt);
  const auto half = run(s);
  CHECK(half.points_evaluated == 50 * 101);
  CHECK(half.freq_pi2_w == 1);
}

TEST_CASE("preimage tangent spaces") {
  const auto pb = builtin("parabola");
  const auto t = preimage_tangent<Rational>(pb.family, pb.z, pt(ratio(1, 2), ratio(1, 4)), exact);
  REQUIRE(t.cols() == 1);
  // tangent to a = x^2 at x = 1/2 is proportional to (1, 1)
  CHECK(t(0, 0) == t(1, 0));
  CHECK(projection_regularity(pb.family, pb.z, pt(ratio(1, 2), ratio(1, 4)), exact) == Regularity::Regular);
  CHECK(projection_regularity(pb.family, pb.z, pt(0, 0), exact) == Regularity::Critical);
  CHECK(to_string(Regularity::Critical) == "critical");
  CHECK_THROWS_AS(preimage_tangent<Rational>(pb.family, pb.z, pt(1, 0), exact), PreconditionError);

  const auto circle = load_scenario(TVX_SCENARIO_DIR "/circle.tvx");
  const auto tc = preimage_tangent<Rational>(circle.family, circle.z, pt(ratio(3, 5), ratio(4, 5)), exact);
  REQUIRE(tc.cols() == 1);
  CHECK(tc(0, 0) * ratio(3, 5) + tc(1, 0) * ratio(4, 5) == 0);
  CHECK(projection_regularity(circle.family, circle.z, pt(0, 1), exact) == Regularity::Critical);
  CHECK(projection_regularity(circle.family, circle.z, pt(1, 0), exact) == Regularity::Regular);
  CHECK(projection_regularity(circle.family, circle.z, pt(ratio(3, 5), ratio(4, 5)), exact) ==
        Regularity::Regular);

  const auto e1 = builtin("example1");
  CHECK_THROWS_AS(preimage_tangent<Rational>(e1.family, e1.z, pt(0, 0), exact), PreconditionError);

  const auto fl = ScalarBackend::floating();
  CHECK(preimage_tangent<double>(pb.family, pb.z, pt(ratio(1, 2), ratio(1, 4)), fl).cols() == 1);
  CHECK(projection_regularity(pb.family, pb.z, pt(0, 0), fl) == Regularity::Critical);
}
