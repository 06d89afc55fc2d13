#include "tvx/genericity.hpp"

#include <algorithm>
#include <exception>
#include <iterator>
#include <thread>

namespace tvx {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Regularity r) { return r == Regularity::Regular ? "regular" : "critical"; }

namespace {

struct SliceResult {
  ParameterFlags flags;
  std::vector<DefectReport> points;
  std::size_t outside = 0;
  std::size_t sup = 0;
};

SliceResult scan_slice(const ParamFamily& f, const SubmanifoldSpec& z, const std::vector<Sample>& xs,
                       const Sample& a, std::size_t index, const ScalarBackend& backend,
                       bool keep_points) {
  SliceResult out;
  out.flags.index = index;
  out.flags.a = a;
  for (const auto& x : xs) {
    const PointXA p{x, a};
    if (!contains(f.domain(), p, backend)) {
      ++out.outside;
      continue;
    }
    ++out.flags.evaluated;
    DefectReport r = classify(f, z, p, backend);
    out.sup = std::max(out.sup, r.delta_family);
    out.flags.in_w = out.flags.in_w || r.stratum.tag == Stratum::Tag::W;
    out.flags.in_wtilde = out.flags.in_wtilde || r.stratum.tag == Stratum::Tag::Wtilde;
    out.flags.nontransverse = out.flags.nontransverse || r.delta_slice > 0;
    if (keep_points) out.points.push_back(std::move(r));
  }
  return out;
}

Verdict verdict(const Rational& freq, const Rational& eps, std::size_t evaluated) {
  if (evaluated == 0) return Verdict::Inconclusive;
  return freq <= eps ? Verdict::Holds : Verdict::Fails;
}

Rational fraction(std::size_t count, std::size_t total) {
  if (total == 0) return Rational(0);
  Rational r(static_cast<unsigned long>(count), static_cast<unsigned long>(total));
  r.canonicalize();
  return r;
}

}  // namespace

GenericityReport scan(const ParamFamily& f, const SubmanifoldSpec& z, const SamplingPlan& plan,
                      const ScalarBackend& backend, const ScanOptions& options) {
  validate_plan(plan, f.domain());
  if (z.ell() != f.ell()) throw ValidationError("z", "ambient dimension differs from ell");
  const auto xs = x_samples(plan);
  const auto as = a_samples(plan);

  std::vector<SliceResult> slices(as.size());
  std::size_t threads = options.threads != 0 ? options.threads
                                             : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(as.size(), 1));

  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](std::size_t worker) {
    try {
      for (std::size_t i = worker; i < as.size(); i += threads) {
        slices[i] = scan_slice(f, z, xs, as[i], i, backend, options.keep_points);
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  GenericityReport report;
  report.a_samples = as.size();
  report.x_samples = xs.size();
  for (auto& s : slices) {
    report.points_outside_domain += s.outside;
    report.points_evaluated += s.flags.evaluated;
    report.delta_sup_est = std::max(report.delta_sup_est, s.sup);
    if (s.flags.evaluated > 0) ++report.a_samples_evaluated;
    if (s.flags.in_w) report.flagged_w.push_back(s.flags.index);
    if (s.flags.in_wtilde) report.flagged_wtilde.push_back(s.flags.index);
    if (s.flags.nontransverse) report.flagged_nontransverse.push_back(s.flags.index);
    report.parameters.push_back(std::move(s.flags));
    std::move(s.points.begin(), s.points.end(), std::back_inserter(report.points));
  }

  const std::size_t denom = report.a_samples_evaluated;
  report.freq_pi2_w = fraction(report.flagged_w.size(), denom);
  report.freq_pi2_wtilde = fraction(report.flagged_wtilde.size(), denom);
  report.freq_nontransverse_slice = fraction(report.flagged_nontransverse.size(), denom);

  std::vector<std::size_t> either;
  std::set_union(report.flagged_w.begin(), report.flagged_w.end(), report.flagged_wtilde.begin(),
                 report.flagged_wtilde.end(), std::back_inserter(either));
  report.identity_holds = either == report.flagged_nontransverse;

  const long bound = static_cast<long>(f.n()) + static_cast<long>(z.q()) - static_cast<long>(f.ell()) +
                     static_cast<long>(report.delta_sup_est);
  report.r_condition.bound = static_cast<std::size_t>(std::max(bound, 0L));
  report.r_condition.declared_r = f.declared_r();
  report.r_condition.satisfied = !f.declared_r() || *f.declared_r() > report.r_condition.bound;

  report.verdict_alpha = verdict(report.freq_pi2_w, plan.eps_alpha, denom);
  report.verdict_beta = verdict(report.freq_nontransverse_slice, plan.eps_beta, denom);
  report.agreement = report.verdict_alpha == report.verdict_beta;
  return report;
}

template <class T>
Matrix<T> preimage_tangent(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                           const ScalarBackend& backend) {
  const DefectReport r = classify(f, z, p, backend);
  if (!r.on_z) throw PreconditionError("F(p) is not on Z");
  if (r.delta_family != 0) {
    throw PreconditionError("F is not transverse to Z at p (delta_family = " +
                            std::to_string(r.delta_family) + ")");
  }
  const std::size_t ell = f.ell();
  Matrix<T> normal;
  if (z.is_slice()) {
    std::vector<std::size_t> rows;
    for (auto i : z.zeroed()) rows.push_back(i - 1);
    normal = Matrix<T>::identity(ell).select_rows(rows);
  } else {
    const std::vector<T> y = evaluate_family<T>(f, p);
    const Bindings<T> b{{}, {}, y};
    normal = Matrix<T>(z.equations().size(), ell);
    for (std::size_t i = 0; i < normal.rows(); ++i)
      for (std::size_t j = 0; j < ell; ++j) normal(i, j) = evaluate(z.equation_partial(i, j), b);
  }
  const Matrix<T> basis = kernel_basis(normal * jacobian_family<T>(f, p), backend);
  const std::size_t expected = f.n() + f.m() - (ell - z.q());
  if (basis.cols() != expected) {
    throw Error("preimage tangent has dimension " + std::to_string(basis.cols()) + ", expected " +
                std::to_string(expected));
  }
  return basis;
}

template Matrix<Rational> preimage_tangent<Rational>(const ParamFamily&, const SubmanifoldSpec&,
                                                    const PointXA&, const ScalarBackend&);
template Matrix<double> preimage_tangent<double>(const ParamFamily&, const SubmanifoldSpec&,
                                                const PointXA&, const ScalarBackend&);

namespace {

template <class T>
Regularity regularity_impl(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                           const ScalarBackend& backend) {
  const Matrix<T> basis = preimage_tangent<T>(f, z, p, backend);
  std::vector<std::size_t> a_rows;
  for (std::size_t j = 0; j < f.m(); ++j) a_rows.push_back(f.n() + j);
  return rank(basis.select_rows(a_rows), backend) == f.m() ? Regularity::Regular : Regularity::Critical;
}

}  // namespace

Regularity projection_regularity(const ParamFamily& f, const SubmanifoldSpec& z, const PointXA& p,
                                 const ScalarBackend& backend) {
  return backend.is_exact() ? regularity_impl<Rational>(f, z, p, backend)
                            : regularity_impl<double>(f, z, p, backend);
}

}  // namespace tvx
