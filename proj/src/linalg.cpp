#include "tvx/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace tvx {

ScalarBackend ScalarBackend::floating(FloatTolerances tol) {
  if (!(tol.rank_rel > 0.0)) throw ValidationError("rank_tol", "must be strictly positive");
  if (!(tol.membership > 0.0)) throw ValidationError("mem_tol", "must be strictly positive");
  ScalarBackend b;
  b.tol_ = tol;
  return b;
}

const FloatTolerances& ScalarBackend::tolerances() const {
  if (!tol_) throw PreconditionError("the exact backend has no tolerances");
  return *tol_;
}

bool operator==(const ScalarBackend& lhs, const ScalarBackend& rhs) {
  if (lhs.is_exact() || rhs.is_exact()) return lhs.is_exact() == rhs.is_exact();
  return lhs.tol_->rank_rel == rhs.tol_->rank_rel && lhs.tol_->membership == rhs.tol_->membership;
}

// ---------------------------------------------------------------------------
// Exact

std::size_t rank(const Matrix<Rational>& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    mpz_class scale = 1;
    for (std::size_t c = 0; c < cols; ++c) {
      mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), m(r, c).get_den_mpz_t());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      a[r][c] = m(r, c).get_num() * (scale / m(r, c).get_den());
    }
  }

  // Entry (r, c) after k pivots is the minor on the pivot rows/columns plus
  // (r, c), so the division by the previous pivot is exact.
  mpz_class previous = 1;
  std::size_t rk = 0;
  for (std::size_t col = 0; col < cols && rk < rows; ++col) {
    std::size_t pivot = rk;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rk]);
    for (std::size_t r = rk + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c) {
        mpz_class value = a[rk][col] * a[r][c] - a[r][col] * a[rk][c];
        mpz_divexact(a[r][c].get_mpz_t(), value.get_mpz_t(), previous.get_mpz_t());
      }
      a[r][col] = 0;
    }
    previous = a[rk][col];
    ++rk;
  }
  return rk;
}

Matrix<Rational> kernel_basis(const Matrix<Rational>& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  Matrix<Rational> r = m;
  std::vector<std::size_t> pivot_cols;
  std::size_t rk = 0;
  for (std::size_t col = 0; col < cols && rk < rows; ++col) {
    std::size_t pivot = rk;
    while (pivot < rows && sgn(r(pivot, col)) == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rk) {
      for (std::size_t c = 0; c < cols; ++c) std::swap(r(pivot, c), r(rk, c));
    }
    const Rational inv = 1 / r(rk, col);
    for (std::size_t c = col; c < cols; ++c) r(rk, c) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rk || sgn(r(i, col)) == 0) continue;
      const Rational factor = r(i, col);
      for (std::size_t c = col; c < cols; ++c) r(i, c) -= factor * r(rk, c);
    }
    pivot_cols.push_back(col);
    ++rk;
  }

  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0, p = 0; c < cols; ++c) {
    if (p < pivot_cols.size() && pivot_cols[p] == c) {
      ++p;
    } else {
      free_cols.push_back(c);
    }
  }

  Matrix<Rational> basis(cols, free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const std::size_t f = free_cols[k];
    basis(f, k) = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) basis(pivot_cols[i], k) = -r(i, f);
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Float

namespace {

Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

std::size_t count_above(const Eigen::VectorXd& sv, std::size_t rows, std::size_t cols,
                        double rank_rel) {
  if (sv.size() == 0) return 0;
  const double largest = sv(0);
  if (!(largest > 0.0)) return 0;
  const double threshold = rank_rel * static_cast<double>(std::max(rows, cols)) * largest;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++count;
  }
  return count;
}

}  // namespace

std::size_t rank(const Matrix<double>& m, const FloatTolerances& tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  return count_above(svd.singularValues(), m.rows(), m.cols(), tol.rank_rel);
}

Matrix<double> kernel_basis(const Matrix<double>& m, const FloatTolerances& tol) {
  const std::size_t cols = m.cols();
  if (m.rows() == 0) return Matrix<double>::identity(cols);
  if (cols == 0) return Matrix<double>(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullV);
  const std::size_t rk = count_above(svd.singularValues(), m.rows(), cols, tol.rank_rel);
  const Eigen::MatrixXd& v = svd.matrixV();
  Matrix<double> basis(cols, cols - rk);
  for (std::size_t k = rk; k < cols; ++k)
    for (std::size_t r = 0; r < cols; ++r) basis(r, k - rk) = v(r, k);
  return basis;
}

// ---------------------------------------------------------------------------
// Backend dispatch

std::size_t rank(const Matrix<Rational>& m, const ScalarBackend&) { return rank(m); }

std::size_t rank(const Matrix<double>& m, const ScalarBackend& backend) {
  return rank(m, backend.tolerances());
}

Matrix<Rational> kernel_basis(const Matrix<Rational>& m, const ScalarBackend&) {
  return kernel_basis(m);
}

Matrix<double> kernel_basis(const Matrix<double>& m, const ScalarBackend& backend) {
  return kernel_basis(m, backend.tolerances());
}

}  // namespace tvx
