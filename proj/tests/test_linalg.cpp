#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tvx/linalg.hpp"

using namespace tvx;

namespace {

Matrix<Rational> from_rows(std::initializer_list<std::initializer_list<long>> rows) {
  Matrix<Rational> m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("rank of small fixed matrices") {
  CHECK(rank(from_rows({{1, 2}, {2, 4}})) == 1);
  CHECK(rank(from_rows({{0, 0}, {0, 0}})) == 0);
  CHECK(rank(from_rows({{0, 1, 0}, {1, 0, 0}})) == 2);
  CHECK(rank(Matrix<Rational>(0, 3)) == 0);
  CHECK(rank(Matrix<Rational>(3, 0)) == 0);
  CHECK(rank(Matrix<Rational>::identity(4)) == 4);
}

TEST_CASE("exact rank agrees with minor enumeration") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 400; ++t) {
    const std::size_t rows = 1 + rng() % 5;
    const std::size_t cols = 1 + rng() % 5;
    const std::size_t target = rng() % (std::min(rows, cols) + 1);
    const auto m = oracle::random_low_rank(rng, rows, cols, target);
    CHECK(rank(m) == oracle::rank_by_minors(m));
  }
}

TEST_CASE("rank is invariant under transposition") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto m = oracle::random_low_rank(rng, 1 + rng() % 6, 1 + rng() % 6, rng() % 4);
    CHECK(rank(m) == rank(m.transpose()));
  }
}

TEST_CASE("exact kernel: rank-nullity and M K = 0") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t cols = 1 + rng() % 6;
    const auto m = oracle::random_low_rank(rng, 1 + rng() % 5, cols, rng() % 4);
    const auto k = kernel_basis(m);
    CHECK(k.rows() == cols);
    CHECK(rank(m) + k.cols() == cols);
    CHECK(rank(k) == k.cols());
    CHECK(m * k == Matrix<Rational>(m.rows(), k.cols()));
  }
}

TEST_CASE("float rank and kernel agree with exact results on well-conditioned data") {
  std::mt19937_64 rng(4);
  const FloatTolerances tol;
  for (int t = 0; t < 300; ++t) {
    const std::size_t cols = 1 + rng() % 5;
    const auto m = oracle::random_low_rank(rng, 1 + rng() % 5, cols, rng() % 4);
    const auto md = oracle::to_double(m);
    CHECK(rank(md, tol) == rank(m));
    const auto k = kernel_basis(md, tol);
    CHECK(k.cols() == cols - rank(m));
    const auto prod = md * k;
    for (std::size_t i = 0; i < prod.rows(); ++i)
      for (std::size_t j = 0; j < prod.cols(); ++j) CHECK(std::abs(prod(i, j)) < 1e-9);
  }
}

TEST_CASE("float rank drops tiny singular values") {
  Matrix<double> m(2, 2);
  m(0, 0) = 1;
  m(1, 1) = 1e-14;
  CHECK(rank(m, FloatTolerances{}) == 1);
  CHECK(rank(m, FloatTolerances{1e-16, 1e-9}) == 2);
}

TEST_CASE("dim_span_union bounds") {
  std::mt19937_64 rng(5);
  const auto backend = ScalarBackend::exact();
  for (int t = 0; t < 200; ++t) {
    const std::size_t ell = 1 + rng() % 5;
    const auto b1 = oracle::random_low_rank(rng, ell, 1 + rng() % 4, rng() % 3);
    const auto b2 = oracle::random_low_rank(rng, ell, 1 + rng() % 4, rng() % 3);
    const std::size_t r1 = rank(b1);
    const std::size_t r2 = rank(b2);
    const std::size_t d = dim_span_union(b1, b2, backend);
    CHECK(d >= std::max(r1, r2));
    CHECK(d <= std::min(r1 + r2, ell));
    CHECK(d == oracle::rank_by_minors(hconcat(b1, b2)));
  }
  CHECK_THROWS_AS(dim_span_union(Matrix<Rational>(2, 1), Matrix<Rational>(3, 1), backend), ValidationError);
}

TEST_CASE("independent_rows picks a greedy maximal independent set") {
  const auto m = from_rows({{1, 2}, {2, 4}, {0, 1}, {1, 3}});
  const auto backend = ScalarBackend::exact();
  CHECK(independent_rows(m, backend) == std::vector<std::size_t>{0, 2});
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto r = oracle::random_low_rank(rng, 1 + rng() % 6, 1 + rng() % 4, rng() % 4);
    const auto rows = independent_rows(r, backend);
    CHECK(rows.size() == rank(r));
    CHECK(rank(r.select_rows(rows)) == rows.size());
  }
}

TEST_CASE("backend construction") {
  CHECK(ScalarBackend::exact().is_exact());
  CHECK(ScalarBackend::exact().name() == "exact");
  CHECK_THROWS_AS(ScalarBackend::exact().tolerances(), Error);
  const auto f = ScalarBackend::floating({1e-8, 1e-6});
  CHECK(f.kind() == ScalarBackend::Kind::Float);
  CHECK(f.tolerances().membership == 1e-6);
  CHECK(f == ScalarBackend::floating({1e-8, 1e-6}));
  CHECK_FALSE(f == ScalarBackend::exact());
  try {
    ScalarBackend::floating({0.0, 1e-9});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "rank_tol");
  }
  try {
    ScalarBackend::floating({1e-10, -1.0});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "mem_tol");
  }
}
