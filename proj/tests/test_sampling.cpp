#include <doctest.h>

#include <set>

#include "tvx/sampling.hpp"

using namespace tvx;

namespace {

SamplingPlan plan_1x1(std::size_t xc, std::size_t ac) {
  SamplingPlan p;
  p.x_box = {ClosedInterval{Rational(-1), Rational(1)}};
  p.a_box = {ClosedInterval{Rational(0), Rational(2)}};
  p.x_count = xc;
  p.a_count = ac;
  return p;
}

DomainSpec free_domain() {
  DomainSpec d;
  d.x_box.resize(1);
  d.a_box.resize(1);
  return d;
}

std::string field_of(const SamplingPlan& p, const DomainSpec& d) {
  try {
    validate_plan(p, d);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("grid axis includes both endpoints") {
  const auto axis = grid_axis(ClosedInterval{Rational(-1), Rational(1)}, 101);
  REQUIRE(axis.size() == 101);
  CHECK(axis.front() == -1);
  CHECK(axis.back() == 1);
  CHECK(axis[50] == 0);
  CHECK(axis[51] == ratio(1, 50));
  CHECK(grid_axis(ClosedInterval{Rational(0), Rational(1)}, 1) == std::vector<Rational>{ratio(1, 2)});
}

TEST_CASE("x grid gains zero and the midpoint, a grid does not") {
  auto p = plan_1x1(4, 4);
  p.x_box = {ClosedInterval{Rational(-1), Rational(2)}};
  const auto xs = x_samples(p);
  std::set<Rational> xv;
  for (const auto& s : xs) xv.insert(s[0]);
  CHECK(xv.count(Rational(0)) == 1);
  CHECK(xv.count(ratio(1, 2)) == 1);
  CHECK(xs.size() == 5);  // -1, 0, 1, 2 and the midpoint 1/2
  const auto as = a_samples(p);
  CHECK(as.size() == 4);

  // an even count on a symmetric box avoids 0 on the a-axis
  auto q = plan_1x1(3, 100);
  q.a_box = {ClosedInterval{Rational(-1), Rational(1)}};
  for (const auto& s : a_samples(q)) CHECK(s[0] != 0);
}

TEST_CASE("cartesian product, last axis fastest") {
  const auto c = cartesian({{Rational(0), Rational(1)}, {Rational(5), Rational(6), Rational(7)}});
  REQUIRE(c.size() == 6);
  CHECK(c[0] == Sample{Rational(0), Rational(5)});
  CHECK(c[1] == Sample{Rational(0), Rational(6)});
  CHECK(c[3] == Sample{Rational(1), Rational(5)});
}

TEST_CASE("unit samples are deterministic dyadic rationals in (0, 1)") {
  std::set<Rational> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Rational u = unit_sample(42, 2, i, 0);
    CHECK(u > 0);
    CHECK(u < 1);
    CHECK(u == unit_sample(42, 2, i, 0));
    seen.insert(u);
  }
  CHECK(seen.size() > 990);
  CHECK(unit_sample(42, 2, 0, 0) != unit_sample(43, 2, 0, 0));
  CHECK(unit_sample(42, 1, 0, 0) != unit_sample(42, 2, 0, 0));
  CHECK(unit_sample(42, 1, 0, 0) != unit_sample(42, 1, 0, 1));
}

TEST_CASE("monte carlo samples stay in the box and append zero and centre") {
  auto p = plan_1x1(50, 30);
  p.mode = SamplingMode::MonteCarlo;
  p.seed = 9;
  const auto xs = x_samples(p);
  REQUIRE(xs.size() == 51);  // zero is also the centre of [-1, 1]
  CHECK(xs.back() == Sample{Rational(0)});
  for (const auto& s : xs) {
    CHECK(s[0] >= -1);
    CHECK(s[0] <= 1);
  }
  const auto as = a_samples(p);
  REQUIRE(as.size() == 30);
  for (const auto& s : as) {
    CHECK(s[0] > 0);
    CHECK(s[0] < 2);
  }
  CHECK(as == a_samples(p));
  auto other = p;
  other.seed = 10;
  CHECK(as != a_samples(other));
}

TEST_CASE("plan validation") {
  const DomainSpec d = free_domain();
  CHECK(field_of(plan_1x1(1, 1), d) == "<no error>");
  CHECK(field_of(plan_1x1(0, 1), d) == "plan.x_count");
  CHECK(field_of(plan_1x1(1, 0), d) == "plan.a_count");
  auto inverted = plan_1x1(1, 1);
  inverted.a_box[0] = ClosedInterval{Rational(1), Rational(0)};
  CHECK(field_of(inverted, d) == "plan.a1");
  auto eps = plan_1x1(1, 1);
  eps.eps_alpha = -1;
  CHECK(field_of(eps, d) == "plan.eps_alpha");
  auto arity = plan_1x1(1, 1);
  arity.x_box.push_back(arity.x_box[0]);
  CHECK(field_of(arity, d) == "plan.x");

  DomainSpec bounded = d;
  bounded.x_box[0] = OpenInterval{Rational(-1), Rational(5)};
  CHECK(field_of(plan_1x1(1, 1), bounded) == "plan.x1");  // the closed box touches -1
}
