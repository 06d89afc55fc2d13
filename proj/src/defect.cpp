#include "tvx/defect.hpp"

#include <algorithm>
#include <numeric>

namespace tvx {

std::string Stratum::to_string() const {
  switch (tag) {
    case Tag::NotOnZ: return "NotOnZ";
    case Tag::Transverse: return "Transverse";
    case Tag::W: return "W";
    case Tag::Wtilde: return "Wtilde(" + std::to_string(rho) + ")";
  }
  return "?";
}

template <class T>
std::vector<T> evaluate_family(const ParamFamily& f, const PointXA& p) {
  const auto x = to_scalars<T>(p.x);
  const auto a = to_scalars<T>(p.a);
  const Bindings<T> b{x, a, {}};
  std::vector<T> y;
  y.reserve(f.ell());
  for (const auto& c : f.components()) y.push_back(evaluate(c, b));
  return y;
}

template <class T>
Matrix<T> jacobian_family(const ParamFamily& f, const PointXA& p) {
  const auto x = to_scalars<T>(p.x);
  const auto a = to_scalars<T>(p.a);
  const Bindings<T> b{x, a, {}};
  const std::size_t cols = f.n() + f.m();
  Matrix<T> j(f.ell(), cols);
  for (std::size_t i = 0; i < f.ell(); ++i)
    for (std::size_t c = 0; c < cols; ++c) j(i, c) = evaluate(f.partial(i, c), b);
  return j;
}

template std::vector<Rational> evaluate_family<Rational>(const ParamFamily&, const PointXA&);
template std::vector<double> evaluate_family<double>(const ParamFamily&, const PointXA&);
template Matrix<Rational> jacobian_family<Rational>(const ParamFamily&, const PointXA&);
template Matrix<double> jacobian_family<double>(const ParamFamily&, const PointXA&);

namespace {

void require_in_domain(const ParamFamily& f, const PointXA& p, const ScalarBackend& backend) {
  if (p.x.size() != f.n() || p.a.size() != f.m()) {
    throw ValidationError("point", "expected " + std::to_string(f.n()) + " x- and " +
                                       std::to_string(f.m()) + " a-coordinates");
  }
  if (!contains(f.domain(), p, backend)) {
    throw PreconditionError("point " + to_string(p) + " lies outside the domain U");
  }
}

template <class T>
DefectReport classify_impl(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                           const ScalarBackend& backend) {
  require_in_domain(f, p, backend);
  if (z.ell() != f.ell()) throw ValidationError("z", "ambient dimension differs from ell");
  const std::size_t ell = f.ell();

  DefectReport r;
  r.point = p;
  const std::vector<T> y = evaluate_family<T>(f, p);
  const Membership mem = membership<T>(z, y, backend);
  r.on_z = mem.on;
  r.membership_margin = mem.margin;
  Matrix<T> jac = jacobian_family<T>(f, p);

  if (!r.on_z) {
    r.sum_dim_family = r.sum_dim_slice = ell;
    r.stratum = {Stratum::Tag::NotOnZ, 0};
    r.mather_hypothesis = true;
    r.jacobian = std::move(jac);
    return r;
  }

  const TangentBasis<T> tz = tangent_of_z<T>(z, y, backend);
  std::vector<std::size_t> x_cols(f.n());
  std::iota(x_cols.begin(), x_cols.end(), 0);
  r.sum_dim_family = dim_span_union(jac, tz.columns, backend);
  r.sum_dim_slice = dim_span_union(jac.select_cols(x_cols), tz.columns, backend);
  r.delta_family = ell - r.sum_dim_family;
  r.delta_slice = ell - r.sum_dim_slice;

  if (r.delta_slice == 0) {
    r.stratum = {Stratum::Tag::Transverse, 0};
  } else if (r.delta_slice == r.delta_family) {
    r.stratum = {Stratum::Tag::W, 0};
  } else {
    r.stratum = {Stratum::Tag::Wtilde, r.delta_family};
  }
  r.mather_hypothesis = r.delta_slice == 0 || r.delta_family < r.delta_slice;
  r.jacobian = std::move(jac);
  return r;
}

}  // namespace

DefectReport classify(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                      const ScalarBackend& backend) {
  return backend.is_exact() ? classify_impl<Rational>(f, z, p, backend)
                            : classify_impl<double>(f, z, p, backend);
}

std::size_t delta_family(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                         const ScalarBackend& backend) {
  return classify(f, z, p, backend).delta_family;
}

std::size_t delta_slice(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                        const ScalarBackend& backend) {
  return classify(f, z, p, backend).delta_slice;
}

bool is_transverse_at(MapKind kind, const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                      const ScalarBackend& backend) {
  const auto r = classify(f, z, p, backend);
  return (kind == MapKind::Family ? r.delta_family : r.delta_slice) == 0;
}

std::size_t delta_sup_estimate(const ParamFamily& f, const SubmanifoldSpec& z,
                               const SamplingPlan& plan, const ScalarBackend& backend) {
  validate_plan(plan, f.domain());
  std::size_t best = 0;
  const auto xs = x_samples(plan);
  for (const auto& a : a_samples(plan)) {
    for (const auto& x : xs) {
      const PointXA p{x, a};
      if (!contains(f.domain(), p, backend)) continue;
      best = std::max(best, delta_family(f, z, p, backend));
    }
  }
  return best;
}

}  // namespace tvx
