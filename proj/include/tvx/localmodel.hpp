#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tvx/defect.hpp"
#include "tvx/geometry.hpp"
#include "tvx/sampling.hpp"

namespace tvx {

/// Which branch of the construction produced the model.
///   Q0          : dim Z = 0; Z̃ zeroes ℓ−ρ independent components of F.
///   QPosFull    : dim Z > 0 and the normal part of JF vanishes at the base
///                 (ℓ−q−ρ = 0); Z̃ is the whole chart.
///   QPosPartial : dim Z > 0 and ℓ−q−ρ > 0; Z̃ zeroes ℓ−q−ρ independent
///                 normal components.
enum class LocalCase { Q0, QPosFull, QPosPartial };

std::string to_string(LocalCase c);

/// An enlarged slice Z̃ ⊃ Z near F(base) and a box Ũ around base on which F
/// is transverse to Z̃, with dim Z̃ = dim Z + ρ, ρ = δ_family(base).
struct LocalModel {
  PointXA base;
  std::size_t ell = 0;
  std::size_t q = 0;
  std::size_t rho = 0;
  LocalCase case_tag = LocalCase::Q0;
  /// 1-based component indices in block order. Q0: the ℓ−ρ pivot rows, then
  /// the rest. Q>0: the q tangent rows, then the ℓ−q−ρ pivot rows, then the
  /// remaining normal rows.
  std::vector<std::size_t> row_permutation;
  /// Number of pivot rows: ℓ−ρ (Q0), ℓ−q−ρ (QPosPartial), 0 (QPosFull).
  std::size_t pivot_rows = 0;
  SubmanifoldSpec ztilde = SubmanifoldSpec::slice(1, {});
  /// Open cube of half-width `half_width` around base.
  DomainSpec utilde;
  Rational half_width;
  std::size_t shrink_steps = 0;
  /// rank of [JF₁ E_q; JF₂ O] at base (q > 0), which equals ℓ − ρ.
  std::optional<std::size_t> rank_m3_base;

  std::size_t ztilde_dim() const { return ztilde.q(); }
};

struct LocalModelOptions {
  /// Starting half-width of Ũ; default min(1, distance to the domain box).
  std::optional<Rational> initial_half_width;
  /// Grid points per axis for the rank-stability check (at least 3).
  std::size_t grid_per_axis = 3;
  std::size_t max_shrinks = 50;
};

/// Requires Z in slice form, F(base) ∈ Z, and ρ = δ_family(base) < ℓ. Throws
/// PreconditionError otherwise, and Error when no rank-stable box is found.
LocalModel build_local_model(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& base,
                             const ScalarBackend& backend, const LocalModelOptions& options = {});

struct PropertyCheck {
  bool passed = true;
  std::optional<PointXA> counterexample;
  std::string detail;
};

struct LocalModelVerification {
  PropertyCheck dimension;       // dim Z̃ = dim Z + ρ
  PropertyCheck containment;     // F(p) ∈ Z ⟹ F(p) ∈ Z̃
  PropertyCheck transversality;  // δ(F|Ũ, p, Z̃) = 0, rank M₂ / M₅ = ℓ on Z̃
  PropertyCheck defect_drop;     // δ(F_a, x, Z) − δ(F_a, x, Z̃) ≤ ρ
  PropertyCheck block_identity;  // rank M₅ = rank M₄ + q + ρ (QPosPartial only)
  std::size_t samples = 0;
  std::size_t samples_on_z = 0;
  std::size_t samples_outside_domain = 0;

  bool passed() const {
    return dimension.passed && containment.passed && transversality.passed && defect_drop.passed &&
           block_identity.passed && samples_outside_domain == 0;
  }
};

/// Checks the four properties at every sample of `plan`'s grid (or Monte
/// Carlo draw) placed inside Ũ; the plan's boxes are ignored. Grid mode uses
/// x_count points on each x-axis and a_count on each a-axis.
LocalModelVerification verify_local_model(const LocalModel& model, const ParamFamily& f,
                                          const SubmanifoldSpec& z, const SamplingPlan& plan,
                                          const ScalarBackend& backend);

/// Samples strictly inside the open cube (centre ± half_width): per-axis
/// cell midpoints centre + h·(−1 + (2j+1)/k).
std::vector<PointXA> interior_grid(const PointXA& centre, const Rational& half_width,
                                   std::size_t x_per_axis, std::size_t a_per_axis);

}  // namespace tvx
