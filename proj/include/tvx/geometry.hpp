#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "tvx/expr.hpp"
#include "tvx/linalg.hpp"
#include "tvx/rational.hpp"

namespace tvx {

/// Open interval (lower, upper); a missing bound is infinite.
struct OpenInterval {
  std::optional<Rational> lower;
  std::optional<Rational> upper;

  bool contains(const Rational& v) const {
    return (!lower || v > *lower) && (!upper || v < *upper);
  }
  bool bounded() const { return lower.has_value() && upper.has_value(); }

  friend bool operator==(const OpenInterval&, const OpenInterval&) = default;
};

/// The open set U ⊂ R^n × R^m: a product of open intervals intersected with
/// {predicate > 0} for every predicate. Empty box vectors mean "unbounded".
struct DomainSpec {
  std::vector<OpenInterval> x_box;
  std::vector<OpenInterval> a_box;
  std::vector<Expr> predicates;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

struct PointXA {
  std::vector<Rational> x;
  std::vector<Rational> a;

  friend bool operator==(const PointXA&, const PointXA&) = default;
};

std::string to_string(const PointXA& p);

/// "v1,v2,..." of rationals or decimals, split after n coordinates.
/// Throws ValidationError("point", ...) on an arity mismatch.
PointXA parse_point(std::string_view text, std::size_t n, std::size_t m);

/// A parametrized family F : U → R^ℓ, U ⊂ R^n × R^m, with its symbolic
/// Jacobian. declared_r == nullopt means C^∞.
class ParamFamily {
 public:
  /// Validates dimensions and variable ranges; throws ValidationError.
  ParamFamily(std::size_t n, std::size_t m, std::vector<Expr> components, DomainSpec domain,
              std::optional<unsigned> declared_r);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t ell() const noexcept { return components_.size(); }
  const std::vector<Expr>& components() const noexcept { return components_; }
  const DomainSpec& domain() const noexcept { return domain_; }
  std::optional<unsigned> declared_r() const noexcept { return declared_r_; }
  bool uses_functions() const;

  /// ∂F_i/∂(column j), columns ordered x1..xn, a1..am (0-based i, j).
  const Expr& partial(std::size_t i, std::size_t j) const { return jacobian_[i * (n_ + m_) + j]; }

  friend bool operator==(const ParamFamily& lhs, const ParamFamily& rhs) {
    return lhs.n_ == rhs.n_ && lhs.m_ == rhs.m_ && lhs.components_ == rhs.components_ &&
           lhs.domain_ == rhs.domain_ && lhs.declared_r_ == rhs.declared_r_;
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<Expr> components_;
  DomainSpec domain_;
  std::optional<unsigned> declared_r_;
  std::vector<Expr> jacobian_;
};

/// Z ⊂ R^ℓ, either a coordinate slice {y_i = 0, i ∈ zeroed} or a level set
/// {g = 0}, intersected with {c > 0} for each open constraint c(y).
class SubmanifoldSpec {
 public:
  enum class Kind { Slice, LevelSet };

  /// `zeroed` holds 1-based coordinate indices; duplicates are rejected.
  static SubmanifoldSpec slice(std::size_t ell, std::vector<std::size_t> zeroed,
                               std::vector<Expr> constraints = {});
  /// Requires 1 ≤ #equations ≤ ℓ.
  static SubmanifoldSpec level_set(std::size_t ell, std::vector<Expr> equations,
                                   std::vector<Expr> constraints = {});

  Kind kind() const noexcept { return kind_; }
  bool is_slice() const noexcept { return kind_ == Kind::Slice; }
  std::size_t ell() const noexcept { return ell_; }
  /// dim Z, derived: ℓ − |zeroed| or ℓ − #equations.
  std::size_t q() const noexcept;
  /// Sorted, 1-based. Empty for level sets.
  const std::vector<std::size_t>& zeroed() const noexcept { return zeroed_; }
  const std::vector<Expr>& equations() const noexcept { return equations_; }
  const std::vector<Expr>& constraints() const noexcept { return constraints_; }
  bool uses_functions() const;

  /// ∂g_i/∂y_j (0-based).
  const Expr& equation_partial(std::size_t i, std::size_t j) const {
    return equation_jacobian_[i * ell_ + j];
  }

  friend bool operator==(const SubmanifoldSpec& lhs, const SubmanifoldSpec& rhs) {
    return lhs.kind_ == rhs.kind_ && lhs.ell_ == rhs.ell_ && lhs.zeroed_ == rhs.zeroed_ &&
           lhs.equations_ == rhs.equations_ && lhs.constraints_ == rhs.constraints_;
  }

 private:
  SubmanifoldSpec() = default;

  Kind kind_ = Kind::Slice;
  std::size_t ell_ = 0;
  std::vector<std::size_t> zeroed_;
  std::vector<Expr> equations_;
  std::vector<Expr> constraints_;
  std::vector<Expr> equation_jacobian_;
};

/// Basis of a linear subspace of R^ℓ stored as matrix columns.
template <class T>
struct TangentBasis {
  std::size_t ambient_dim = 0;
  Matrix<T> columns;

  std::size_t dim() const noexcept { return columns.cols(); }
};

/// Strict box membership (always exact) and predicate > 0 (exact) or
/// > membership tolerance (float). Throws ValidationError on arity mismatch.
bool contains(const DomainSpec& domain, const PointXA& p, const ScalarBackend& backend);

struct Membership {
  bool on = false;
  /// Float backend only: smallest distance of any tested quantity from its
  /// decision threshold. Small margins flag borderline samples.
  std::optional<double> margin;
};

template <class T>
Membership membership(const SubmanifoldSpec& z, std::span<const T> y, const ScalarBackend& backend);

template <class T>
bool on_submanifold(const SubmanifoldSpec& z, std::span<const T> y, const ScalarBackend& backend) {
  return membership(z, y, backend).on;
}

/// T_y Z. Slices: the coordinate vectors of the non-zeroed indices. Level
/// sets: ker Jg(y); throws RegularityError when rank Jg(y) < ℓ − q.
template <class T>
TangentBasis<T> tangent_of_z(const SubmanifoldSpec& z, std::span<const T> y,
                             const ScalarBackend& backend);

extern template Membership membership<Rational>(const SubmanifoldSpec&, std::span<const Rational>,
                                                const ScalarBackend&);
extern template Membership membership<double>(const SubmanifoldSpec&, std::span<const double>,
                                              const ScalarBackend&);
extern template TangentBasis<Rational> tangent_of_z<Rational>(const SubmanifoldSpec&,
                                                             std::span<const Rational>,
                                                             const ScalarBackend&);
extern template TangentBasis<double> tangent_of_z<double>(const SubmanifoldSpec&,
                                                         std::span<const double>,
                                                         const ScalarBackend&);

/// Converts a rational point to the backend's scalar type.
template <class T>
std::vector<T> to_scalars(std::span<const Rational> values) {
  std::vector<T> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if constexpr (std::is_same_v<T, double>) {
      out.push_back(to_double(v));
    } else {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace tvx
