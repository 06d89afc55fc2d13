#include <doctest.h>

#include "oracles.hpp"
#include "tvx/localmodel.hpp"
#include "tvx/scenario.hpp"

using namespace tvx;

namespace {

const auto exact = ScalarBackend::exact();

PointXA pt(Rational x, Rational a) { return PointXA{{std::move(x)}, {std::move(a)}}; }

SamplingPlan grid_plan(std::size_t k) {
  SamplingPlan p;
  p.x_count = k;
  p.a_count = k;
  return p;
}

}  // namespace

TEST_CASE("interior grid uses cell midpoints strictly inside the cube") {
  const auto g = interior_grid(pt(1, 2), ratio(1, 2), 3, 2);
  REQUIRE(g.size() == 6);
  CHECK(g[0] == pt(ratio(2, 3), ratio(7, 4)));
  CHECK(g[5] == pt(ratio(4, 3), ratio(9, 4)));
  for (const auto& p : interior_grid(pt(0, 0), Rational(1), 21, 21)) {
    CHECK(abs(p.x[0]) < 1);
    CHECK(abs(p.a[0]) < 1);
  }
}

TEST_CASE("example 3 at (1/2, 0): positive-dimensional Z, partial pivot block") {
  const Scenario s = builtin("example3");
  const LocalModel m = build_local_model(s.family, s.z, pt(ratio(1, 2), 0), exact);
  CHECK(m.case_tag == LocalCase::QPosPartial);
  CHECK(to_string(m.case_tag) == "Q_POS_PARTIAL");
  CHECK(m.ell == 3);
  CHECK(m.q == 1);
  CHECK(m.rho == 1);
  CHECK(m.pivot_rows == 1);
  CHECK(m.row_permutation == std::vector<std::size_t>{1, 2, 3});
  CHECK(m.ztilde.zeroed() == std::vector<std::size_t>{2});
  CHECK(m.ztilde_dim() == 2);
  REQUIRE(m.rank_m3_base.has_value());
  CHECK(*m.rank_m3_base == m.ell - m.rho);
  CHECK(m.half_width > 0);

  const auto v = verify_local_model(m, s.family, s.z, grid_plan(21), exact);
  CHECK(v.passed());
  CHECK(v.samples == 441);
  CHECK(v.samples_on_z > 0);
}

TEST_CASE("Q0: F = a with Z = {0}") {
  const Scenario s = load_scenario(TVX_SCENARIO_DIR "/q0_linear.tvx");
  const LocalModel m = build_local_model(s.family, s.z, pt(0, 0), exact);
  CHECK(m.case_tag == LocalCase::Q0);
  CHECK(m.rho == 0);
  CHECK(m.pivot_rows == 1);
  CHECK(m.ztilde.zeroed() == std::vector<std::size_t>{1});
  CHECK_FALSE(m.rank_m3_base.has_value());
  CHECK(verify_local_model(m, s.family, s.z, grid_plan(21), exact).passed());
}

TEST_CASE("Q_POS_FULL: F = (a, 0) with Z = {y2 = 0}") {
  const Scenario s = load_scenario(TVX_SCENARIO_DIR "/qpos_full.tvx");
  const LocalModel m = build_local_model(s.family, s.z, pt(ratio(1, 3), 0), exact);
  CHECK(m.case_tag == LocalCase::QPosFull);
  CHECK(m.rho == 1);
  CHECK(m.pivot_rows == 0);
  CHECK(m.ztilde.zeroed().empty());
  CHECK(m.ztilde_dim() == 2);
  const auto v = verify_local_model(m, s.family, s.z, grid_plan(21), exact);
  CHECK(v.passed());
}

TEST_CASE("the box shrinks until the pivot block keeps full rank") {
  // dF/dx = 1 - (3/2) x vanishes at x = 2/3, a midpoint of the 3-grid at h = 1
  const ParamFamily f(1, 1, {parse_expr("x1 - 3/4 * x1^2")}, {}, std::nullopt);
  const auto z = SubmanifoldSpec::slice(1, {1});
  const LocalModel m = build_local_model(f, z, pt(0, 0), exact);
  CHECK(m.case_tag == LocalCase::Q0);
  CHECK(m.shrink_steps == 1);
  CHECK(m.half_width == ratio(1, 2));
  CHECK(verify_local_model(m, f, z, grid_plan(21), exact).passed());
}

TEST_CASE("the initial box respects finite domain bounds") {
  DomainSpec d;
  d.x_box = {OpenInterval{Rational(0), Rational(1)}};
  d.a_box = {OpenInterval{}};
  const ParamFamily f(1, 1, {parse_expr("a1")}, d, std::nullopt);
  const auto z = SubmanifoldSpec::slice(1, {1});
  const LocalModel m = build_local_model(f, z, pt(ratio(1, 4), 0), exact);
  CHECK(m.half_width == ratio(1, 4));
  const auto v = verify_local_model(m, f, z, grid_plan(9), exact);
  CHECK(v.samples_outside_domain == 0);
  CHECK(v.passed());
}

TEST_CASE("block identity holds at every sample, recomputed by minors") {
  const Scenario s = builtin("example3");
  const LocalModel m = build_local_model(s.family, s.z, pt(ratio(1, 2), 0), exact);
  for (const auto& p : interior_grid(m.base, m.half_width, 7, 7)) {
    const auto jac = jacobian_family<Rational>(s.family, p);
    // M5 = [JF | e1 e3] in block order (1, 2, 3); M4 = row 2 of JF
    Matrix<Rational> m5 = hconcat(jac, Matrix<Rational>::identity(3).select_cols(std::vector<std::size_t>{0, 2}));
    const auto m4 = jac.select_rows(std::vector<std::size_t>{1});
    CHECK(oracle::rank_by_minors(m5) == oracle::rank_by_minors(m4) + m.q + m.rho);
  }
}

TEST_CASE("a corrupted model fails verification") {
  const Scenario s = builtin("example3");
  LocalModel m = build_local_model(s.family, s.z, pt(ratio(1, 2), 0), exact);
  m.ztilde = SubmanifoldSpec::slice(3, {2, 3});  // Z~ = Z, too small
  const auto v = verify_local_model(m, s.family, s.z, grid_plan(11), exact);
  CHECK_FALSE(v.passed());
  CHECK_FALSE(v.dimension.passed);
  CHECK_FALSE(v.transversality.passed);
  CHECK(v.transversality.counterexample.has_value());
}

TEST_CASE("preconditions") {
  const Scenario e1 = builtin("example1");
  CHECK_THROWS_AS(build_local_model(e1.family, e1.z, pt(0, 0), exact), PreconditionError);  // rho = ell
  const Scenario e3 = builtin("example3");
  CHECK_THROWS_AS(build_local_model(e3.family, e3.z, pt(ratio(1, 2), 1), exact), PreconditionError);
  const Scenario circle = load_scenario(TVX_SCENARIO_DIR "/circle.tvx");
  CHECK_THROWS_AS(build_local_model(circle.family, circle.z, pt(0, 1), exact), PreconditionError);
}

TEST_CASE("float backend builds the same model") {
  const Scenario s = builtin("example3");
  const auto fl = ScalarBackend::floating();
  const LocalModel m = build_local_model(s.family, s.z, pt(ratio(1, 2), 0), fl);
  CHECK(m.case_tag == LocalCase::QPosPartial);
  CHECK(m.ztilde.zeroed() == std::vector<std::size_t>{2});
  CHECK(verify_local_model(m, s.family, s.z, grid_plan(21), fl).passed());
}
