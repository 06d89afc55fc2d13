#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tvx/defect.hpp"
#include "tvx/geometry.hpp"
#include "tvx/sampling.hpp"

namespace tvx {

enum class Verdict { Holds, Fails, Inconclusive };

std::string to_string(Verdict v);

/// max{n + q − ℓ + δ̂, 0} against the declared differentiability class.
struct RCondition {
  std::size_t bound = 0;
  std::optional<unsigned> declared_r;  // nullopt: C^∞
  bool satisfied = true;
};

/// Per-parameter-sample flags, keyed by a-sample index.
struct ParameterFlags {
  std::size_t index = 0;
  Sample a;
  std::size_t evaluated = 0;  // x-samples inside U
  bool in_w = false;
  bool in_wtilde = false;
  bool nontransverse = false;
};

/// Empirical evidence for the equivalence of
///   (α) π₂(W) has measure zero, and
///   (β) F_a is transverse to Z for almost every a.
/// A "holds" verdict means no sampled witness beyond the ε threshold; it is
/// evidence, not a proof.
struct GenericityReport {
  std::size_t a_samples = 0;
  std::size_t a_samples_evaluated = 0;
  std::size_t x_samples = 0;
  std::size_t points_evaluated = 0;
  std::size_t points_outside_domain = 0;

  std::vector<std::size_t> flagged_w;
  std::vector<std::size_t> flagged_wtilde;
  std::vector<std::size_t> flagged_nontransverse;

  Rational freq_pi2_w;
  Rational freq_pi2_wtilde;
  Rational freq_nontransverse_slice;

  std::size_t delta_sup_est = 0;
  RCondition r_condition;
  Verdict verdict_alpha = Verdict::Inconclusive;
  Verdict verdict_beta = Verdict::Inconclusive;
  bool agreement = false;
  /// {a non-transverse} = {a ∈ π₂(W)} ∪ {a ∈ π₂(W̃)} over sample indices.
  bool identity_holds = false;

  std::vector<ParameterFlags> parameters;
  /// Every classified point, ordered by (a index, x index).
  std::vector<DefectReport> points;
};

struct ScanOptions {
  /// Worker threads; 0 selects std::thread::hardware_concurrency().
  std::size_t threads = 0;
  bool keep_points = true;
};

/// Classifies every (x-sample, a-sample) pair inside U. Deterministic for a
/// given plan regardless of the thread count.
GenericityReport scan(const ParamFamily& f, const SubmanifoldSpec& z, const SamplingPlan& plan,
                      const ScalarBackend& backend, const ScanOptions& options = {});

/// Basis (columns) of T_p F⁻¹(Z) = ker(N · JF(p)), where the rows of N span
/// the annihilator of T Z (zeroed coordinate rows for slices, Jg for level
/// sets). Requires F(p) ∈ Z and δ_family(p) = 0; throws PreconditionError.
/// The column count is n + m − (ℓ − q).
template <class T>
Matrix<T> preimage_tangent(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                           const ScalarBackend& backend);

extern template Matrix<Rational> preimage_tangent<Rational>(const ParamFamily&, const SubmanifoldSpec&,
                                                           const PointXA&, const ScalarBackend&);
extern template Matrix<double> preimage_tangent<double>(const ParamFamily&, const SubmanifoldSpec&,
                                                       const PointXA&, const ScalarBackend&);

enum class Regularity { Regular, Critical };

std::string to_string(Regularity r);

/// Regular iff the a-rows of the preimage tangent basis have rank m, i.e. p
/// is a regular point of π₂ restricted to F⁻¹(Z).
Regularity projection_regularity(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                                 const ScalarBackend& backend);

}  // namespace tvx
