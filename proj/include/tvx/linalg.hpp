#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvx/errors.hpp"
#include "tvx/rational.hpp"

namespace tvx {

struct FloatTolerances {
  /// Singular values at or below rank_rel * max(rows, cols) * sigma_max count as zero.
  double rank_rel = 1e-10;
  /// Absolute tolerance for "equals zero" and "strictly positive" tests.
  double membership = 1e-9;
};

/// Selects the scalar type used for every rank and membership decision.
/// The exact backend carries no tolerances.
class ScalarBackend {
 public:
  enum class Kind { ExactRational, Float };

  static ScalarBackend exact() { return ScalarBackend(); }
  /// Throws ValidationError unless both tolerances are strictly positive.
  static ScalarBackend floating(FloatTolerances tol = {});

  Kind kind() const noexcept { return tol_ ? Kind::Float : Kind::ExactRational; }
  bool is_exact() const noexcept { return !tol_.has_value(); }
  /// Precondition: !is_exact().
  const FloatTolerances& tolerances() const;

  std::string name() const { return is_exact() ? "exact" : "float"; }

  friend bool operator==(const ScalarBackend&, const ScalarBackend&);

 private:
  ScalarBackend() = default;
  std::optional<FloatTolerances> tol_;
};

/// Dense row-major matrix. Zero rows or zero columns are allowed.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Matrix select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i)
      for (std::size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(indices[i], c);
    return out;
  }

  Matrix select_cols(std::span<const std::size_t> indices) const {
    Matrix out(rows_, indices.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
    return out;
  }

  /// Column concatenation [lhs | rhs].
  friend Matrix hconcat(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows_ != rhs.rows_) {
      throw ValidationError("matrix", "row count mismatch in column concatenation (" +
                                          std::to_string(lhs.rows_) + " vs " +
                                          std::to_string(rhs.rows_) + ")");
    }
    Matrix out(lhs.rows_, lhs.cols_ + rhs.cols_);
    for (std::size_t r = 0; r < lhs.rows_; ++r) {
      for (std::size_t c = 0; c < lhs.cols_; ++c) out(r, c) = lhs(r, c);
      for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, lhs.cols_ + c) = rhs(r, c);
    }
    return out;
  }

  friend Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    Matrix out(lhs.rows_, rhs.cols_);
    for (std::size_t r = 0; r < lhs.rows_; ++r)
      for (std::size_t k = 0; k < lhs.cols_; ++k)
        for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += lhs(r, k) * rhs(k, c);
    return out;
  }

  friend bool operator==(const Matrix& lhs, const Matrix& rhs) {
    return lhs.rows_ == rhs.rows_ && lhs.cols_ == rhs.cols_ && lhs.data_ == rhs.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Exact rank over the rationals. Rows are cleared of denominators and reduced
/// by fraction-free (Bareiss) elimination with row pivoting.
std::size_t rank(const Matrix<Rational>& m);

/// Numerical rank: number of singular values above
/// rank_rel * max(rows, cols) * sigma_max.
std::size_t rank(const Matrix<double>& m, const FloatTolerances& tol);

std::size_t rank(const Matrix<Rational>& m, const ScalarBackend& backend);
std::size_t rank(const Matrix<double>& m, const ScalarBackend& backend);

/// Basis of the null space as columns; M * K == 0 exactly.
Matrix<Rational> kernel_basis(const Matrix<Rational>& m);
/// Right singular vectors of the numerically-zero singular values.
Matrix<double> kernel_basis(const Matrix<double>& m, const FloatTolerances& tol);

Matrix<Rational> kernel_basis(const Matrix<Rational>& m, const ScalarBackend& backend);
Matrix<double> kernel_basis(const Matrix<double>& m, const ScalarBackend& backend);

/// Dimension of span(B1) + span(B2): the rank of [B1 | B2].
/// Throws ValidationError when the ambient dimensions differ.
template <class T>
std::size_t dim_span_union(const Matrix<T>& b1, const Matrix<T>& b2, const ScalarBackend& backend) {
  return rank(hconcat(b1, b2), backend);
}

/// Greedy pivoted row selection: indices (ascending) of a maximal set of
/// linearly independent rows, scanning rows in order.
template <class T>
std::vector<std::size_t> independent_rows(const Matrix<T>& m, const ScalarBackend& backend) {
  std::vector<std::size_t> chosen;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    chosen.push_back(r);
    if (rank(m.select_rows(chosen), backend) < chosen.size()) chosen.pop_back();
  }
  return chosen;
}

}  // namespace tvx
