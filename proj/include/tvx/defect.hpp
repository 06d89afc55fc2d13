#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "tvx/geometry.hpp"
#include "tvx/linalg.hpp"
#include "tvx/sampling.hpp"

namespace tvx {

/// Which map the defect refers to: the family F on U or the slice map
/// F_a : x ↦ F(x, a).
enum class MapKind { Family, Slice };

struct Stratum {
  enum class Tag { NotOnZ, Transverse, W, Wtilde };

  Tag tag = Tag::NotOnZ;
  /// δ_family for Wtilde; 0 otherwise.
  std::size_t rho = 0;

  std::string to_string() const;

  friend bool operator==(const Stratum&, const Stratum&) = default;
};

using JacobianValue = std::variant<Matrix<Rational>, Matrix<double>>;

/// Pointwise defect data. When F(p) ∉ Z both defects are 0 and both tangent
/// sums are reported as ℓ, so δ = ℓ − sum holds in every case.
struct DefectReport {
  PointXA point;
  bool on_z = false;
  std::size_t delta_family = 0;
  std::size_t delta_slice = 0;
  std::size_t sum_dim_family = 0;
  std::size_t sum_dim_slice = 0;
  Stratum stratum;
  /// δ_slice = 0 or δ_family < δ_slice.
  bool mather_hypothesis = true;
  std::optional<double> membership_margin;
  JacobianValue jacobian;
};

/// ℓ × (n+m) Jacobian at p, columns x1..xn, a1..am.
template <class T>
Matrix<T> jacobian_family(const ParamFamily& f, const PointXA& p);

extern template Matrix<Rational> jacobian_family<Rational>(const ParamFamily&, const PointXA&);
extern template Matrix<double> jacobian_family<double>(const ParamFamily&, const PointXA&);

/// F(p) in the backend's scalar type.
template <class T>
std::vector<T> evaluate_family(const ParamFamily& f, const PointXA& p);

extern template std::vector<Rational> evaluate_family<Rational>(const ParamFamily&, const PointXA&);
extern template std::vector<double> evaluate_family<double>(const ParamFamily&, const PointXA&);

/// The operations below require p ∈ U and throw PreconditionError otherwise.
/// δ values are computed from ranks only:
///   δ_family = ℓ − dim(span JF(p) + T Z),
///   δ_slice  = ℓ − dim(span of the x-columns of JF(p) + T Z).

std::size_t delta_family(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                         const ScalarBackend& backend);
std::size_t delta_slice(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                        const ScalarBackend& backend);
bool is_transverse_at(MapKind kind, const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                      const ScalarBackend& backend);
DefectReport classify(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                      const ScalarBackend& backend);

/// max δ_family over the plan's sample grid (points outside U are skipped).
/// A lower bound for δ(F, Z); the true supremum is not computable.
std::size_t delta_sup_estimate(const ParamFamily& f, const SubmanifoldSpec& z,
                               const SamplingPlan& plan, const ScalarBackend& backend);

}  // namespace tvx
