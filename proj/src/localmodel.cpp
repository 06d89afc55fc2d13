#include "tvx/localmodel.hpp"

#include <algorithm>
#include <numeric>

namespace tvx {

std::string to_string(LocalCase c) {
  switch (c) {
    case LocalCase::Q0: return "Q0";
    case LocalCase::QPosFull: return "Q_POS_FULL";
    case LocalCase::QPosPartial: return "Q_POS_PARTIAL";
  }
  return "?";
}

std::vector<PointXA> interior_grid(const PointXA& centre, const Rational& half_width,
                                   std::size_t x_per_axis, std::size_t a_per_axis) {
  auto axis = [&](const Rational& c, std::size_t k) {
    std::vector<Rational> out;
    for (std::size_t j = 0; j < k; ++j) {
      const Rational t = Rational(-1) + ratio(static_cast<long>(2 * j + 1), static_cast<long>(k));
      out.push_back(Rational(c + half_width * t));
    }
    return out;
  };
  std::vector<std::vector<Rational>> axes;
  for (const auto& c : centre.x) axes.push_back(axis(c, x_per_axis));
  for (const auto& c : centre.a) axes.push_back(axis(c, a_per_axis));
  std::vector<PointXA> out;
  const std::size_t n = centre.x.size();
  for (auto& s : cartesian(axes)) {
    PointXA p;
    p.x.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    p.a.assign(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<std::size_t> complement(std::size_t ell, const std::vector<std::size_t>& sorted_subset) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= ell; ++i) {
    if (!std::binary_search(sorted_subset.begin(), sorted_subset.end(), i)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> zero_based(const std::vector<std::size_t>& one_based) {
  std::vector<std::size_t> out;
  out.reserve(one_based.size());
  for (auto i : one_based) out.push_back(i - 1);
  return out;
}

/// Rows of JF (0-based component indices) that form the pivot block.
std::vector<std::size_t> pivot_block(const LocalModel& model) {
  const std::size_t offset = model.case_tag == LocalCase::Q0 ? 0 : model.q;
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < model.pivot_rows; ++k) rows.push_back(model.row_permutation[offset + k] - 1);
  return rows;
}

/// The block matrix whose rank certifies transversality to Z̃: JF with rows
/// in block order, followed by identity columns spanning T Z̃ in the same
/// coordinates (M₂ when q = 0, M₅ when q > 0).
template <class T>
Matrix<T> certificate_matrix(const LocalModel& model, const Matrix<T>& jac) {
  const auto perm = zero_based(model.row_permutation);
  const Matrix<T> permuted = jac.select_rows(perm);
  // Z̃ leaves free the q tangent rows and the trailing ρ rows; in the
  // QPosFull case q + ρ = ℓ and every row is free.
  std::vector<std::size_t> free_rows(model.q);
  std::iota(free_rows.begin(), free_rows.end(), 0);
  for (std::size_t k = model.ell - model.rho; k < model.ell; ++k) free_rows.push_back(k);
  const Matrix<T> tangent = Matrix<T>::identity(model.ell).select_cols(free_rows);
  return hconcat(permuted, tangent);
}

template <class T>
LocalModel build_impl(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& base,
                      const ScalarBackend& backend, const LocalModelOptions& options) {
  if (!z.is_slice()) {
    throw PreconditionError("local models need Z in slice form; convert the level set to a chart first");
  }
  const DefectReport at_base = classify(f, z, base, backend);
  if (!at_base.on_z) throw PreconditionError("F(base) is not on Z");

  LocalModel model;
  model.base = base;
  model.ell = f.ell();
  model.q = z.q();
  model.rho = at_base.delta_family;
  const std::size_t ell = model.ell;
  const std::size_t q = model.q;
  const std::size_t rho = model.rho;
  if (rho >= ell) {
    throw PreconditionError("delta_family(base) = " + std::to_string(rho) +
                            " equals ell; no local model exists (rho < ell is required)");
  }

  const Matrix<T> jac = jacobian_family<T>(f, base);
  const std::vector<std::size_t> normal = z.zeroed();         // 1-based, the F₂ rows
  const std::vector<std::size_t> tangent = complement(ell, normal);  // the F₁ rows

  std::vector<std::size_t> pivots;  // 1-based component indices
  if (q == 0) {
    model.case_tag = LocalCase::Q0;
    const auto rows = independent_rows(jac, backend);
    if (rows.size() != ell - rho) throw Error("rank JF(base) disagrees with ell - rho");
    for (auto r : rows) pivots.push_back(r + 1);
  } else {
    const Matrix<T> jf2 = jac.select_rows(zero_based(normal));
    const auto rows = independent_rows(jf2, backend);
    if (rows.size() != ell - q - rho) throw Error("rank JF2(base) disagrees with ell - q - rho");
    for (auto r : rows) pivots.push_back(normal[r]);
    model.case_tag = pivots.empty() ? LocalCase::QPosFull : LocalCase::QPosPartial;

    // M₃(base) = [JF₁ E_q; JF₂ O]
    const Matrix<T> jf1 = jac.select_rows(zero_based(tangent));
    Matrix<T> left(ell, jac.cols());
    Matrix<T> right(ell, q);
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t c = 0; c < jac.cols(); ++c) left(i, c) = jf1(i, c);
      right(i, i) = T(1);
    }
    for (std::size_t i = 0; i < jf2.rows(); ++i)
      for (std::size_t c = 0; c < jac.cols(); ++c) left(q + i, c) = jf2(i, c);
    model.rank_m3_base = rank(hconcat(left, right), backend);
  }
  model.pivot_rows = pivots.size();

  std::vector<std::size_t> rest;
  for (auto i : normal) {
    if (std::find(pivots.begin(), pivots.end(), i) == pivots.end()) rest.push_back(i);
  }
  if (q > 0) model.row_permutation = tangent;
  model.row_permutation.insert(model.row_permutation.end(), pivots.begin(), pivots.end());
  model.row_permutation.insert(model.row_permutation.end(), rest.begin(), rest.end());

  std::vector<std::size_t> zeroed = pivots;
  std::sort(zeroed.begin(), zeroed.end());
  model.ztilde = SubmanifoldSpec::slice(ell, zeroed);

  // Initial half-width: min(1, distance from base to every finite bound).
  Rational h = options.initial_half_width.value_or(Rational(1));
  if (sgn(h) <= 0) throw ValidationError("initial_half_width", "must be positive");
  auto tighten = [&](const std::vector<OpenInterval>& box, const std::vector<Rational>& c) {
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (box[i].lower) h = std::min(h, Rational(c[i] - *box[i].lower));
      if (box[i].upper) h = std::min(h, Rational(*box[i].upper - c[i]));
    }
  };
  tighten(f.domain().x_box, base.x);
  tighten(f.domain().a_box, base.a);

  const std::size_t k = std::max<std::size_t>(options.grid_per_axis, 3);
  const std::vector<std::size_t> pivot_rows_0 = zero_based(pivots);
  for (std::size_t step = 0; step <= options.max_shrinks; ++step) {
    bool stable = true;
    for (const auto& p : interior_grid(base, h, k, k)) {
      if (!contains(f.domain(), p, backend)) {
        stable = false;
        break;
      }
      if (pivot_rows_0.empty()) continue;
      const Matrix<T> block = jacobian_family<T>(f, p).select_rows(pivot_rows_0);
      if (rank(block, backend) < pivot_rows_0.size()) {
        stable = false;
        break;
      }
    }
    if (stable) {
      model.half_width = h;
      model.shrink_steps = step;
      for (const auto& c : base.x) model.utilde.x_box.push_back({Rational(c - h), Rational(c + h)});
      for (const auto& c : base.a) model.utilde.a_box.push_back({Rational(c - h), Rational(c + h)});
      return model;
    }
    h /= 2;
  }
  throw Error("no rank-stable neighbourhood found within " + std::to_string(options.max_shrinks) +
              " shrink steps");
}

template <class T>
LocalModelVerification verify_impl(const LocalModel& model, const ParamFamily& f,
                                   const SubmanifoldSpec& z, const SamplingPlan& plan,
                                   const ScalarBackend& backend) {
  LocalModelVerification v;
  auto fail = [](PropertyCheck& check, const PointXA* p, std::string detail) {
    if (!check.passed) return;
    check.passed = false;
    if (p) check.counterexample = *p;
    check.detail = std::move(detail);
  };

  if (model.ztilde_dim() != z.q() + model.rho) {
    fail(v.dimension, nullptr,
         "dim Z~ = " + std::to_string(model.ztilde_dim()) + " but dim Z + rho = " +
             std::to_string(z.q() + model.rho));
  }

  std::vector<PointXA> samples;
  if (plan.mode == SamplingMode::Grid) {
    samples = interior_grid(model.base, model.half_width, plan.x_count, plan.a_count);
  } else {
    const std::size_t dims = model.base.x.size() + model.base.a.size();
    for (std::size_t s = 0; s < plan.x_count * plan.a_count; ++s) {
      PointXA p = model.base;
      for (std::size_t c = 0; c < dims; ++c) {
        const Rational t = 2 * unit_sample(plan.seed, 3, s, c) - 1;
        Rational& coord = c < p.x.size() ? p.x[c] : p.a[c - p.x.size()];
        coord += model.half_width * t;
      }
      samples.push_back(std::move(p));
    }
  }

  const std::vector<std::size_t> pivot_rows_0 = pivot_block(model);
  for (const auto& p : samples) {
    if (!contains(f.domain(), p, backend)) {
      ++v.samples_outside_domain;
      continue;
    }
    ++v.samples;
    const DefectReport wrt_z = classify(f, z, p, backend);
    const DefectReport wrt_zt = classify(f, model.ztilde, p, backend);
    if (wrt_z.on_z) ++v.samples_on_z;

    if (wrt_z.on_z && !wrt_zt.on_z) fail(v.containment, &p, "F(p) is on Z but not on Z~");

    const Matrix<T> jac = jacobian_family<T>(f, p);
    if (wrt_zt.delta_family != 0) {
      fail(v.transversality, &p, "delta(F, p, Z~) = " + std::to_string(wrt_zt.delta_family));
    }
    const Matrix<T> cert = certificate_matrix(model, jac);
    const std::size_t cert_rank = rank(cert, backend);
    if (wrt_zt.on_z && cert_rank != model.ell) {
      fail(v.transversality, &p, "rank of the block certificate is " + std::to_string(cert_rank));
    }

    if (wrt_z.delta_slice > wrt_zt.delta_slice + model.rho) {
      fail(v.defect_drop, &p,
           "delta_slice(Z) - delta_slice(Z~) = " + std::to_string(wrt_z.delta_slice) + " - " +
               std::to_string(wrt_zt.delta_slice) + " > rho");
    }

    if (model.case_tag == LocalCase::QPosPartial) {
      const std::size_t m4 = rank(jac.select_rows(pivot_rows_0), backend);
      if (cert_rank != m4 + model.q + model.rho) {
        fail(v.block_identity, &p,
             "rank M5 = " + std::to_string(cert_rank) + " but rank M4 + q + rho = " +
                 std::to_string(m4 + model.q + model.rho));
      }
    }
  }
  return v;
}

}  // namespace

LocalModel build_local_model(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& base,
                             const ScalarBackend& backend, const LocalModelOptions& options) {
  return backend.is_exact() ? build_impl<Rational>(f, z, base, backend, options)
                            : build_impl<double>(f, z, base, backend, options);
}

LocalModelVerification verify_local_model(const LocalModel& model, const ParamFamily& f,
                                          const SubmanifoldSpec& z, const SamplingPlan& plan,
                                          const ScalarBackend& backend) {
  return backend.is_exact() ? verify_impl<Rational>(model, f, z, plan, backend)
                            : verify_impl<double>(model, f, z, plan, backend);
}

}  // namespace tvx
