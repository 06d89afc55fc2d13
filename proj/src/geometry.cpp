#include "tvx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvx {

std::string to_string(const PointXA& p) {
  std::string out = "(";
  bool first = true;
  for (const auto* coords : {&p.x, &p.a}) {
    for (const auto& v : *coords) {
      if (!first) out += ", ";
      out += to_string(v);
      first = false;
    }
  }
  return out + ")";
}

PointXA parse_point(std::string_view text, std::size_t n, std::size_t m) {
  std::vector<Rational> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string_view item = text.substr(start, comma == std::string_view::npos ? comma : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    try {
      values.push_back(parse_rational(item));
    } catch (const ParseError&) {
      throw ValidationError("point", "malformed coordinate '" + std::string(item) + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() != n + m) {
    throw ValidationError("point", "expected " + std::to_string(n + m) + " coordinates (n=" +
                                       std::to_string(n) + ", m=" + std::to_string(m) + "), got " +
                                       std::to_string(values.size()));
  }
  PointXA p;
  p.x.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n));
  p.a.assign(values.begin() + static_cast<std::ptrdiff_t>(n), values.end());
  return p;
}

// ---------------------------------------------------------------------------
// ParamFamily

namespace {

void check_interval(const OpenInterval& iv, const std::string& field) {
  if (iv.lower && iv.upper && !(*iv.lower < *iv.upper)) {
    throw ValidationError(field, "empty interval (lower bound must be below upper bound)");
  }
}

void check_vars(const Expr& e, std::size_t n, std::size_t m, std::size_t ell,
                const std::string& field) {
  if (const auto k = max_index(e, VarClass::X); k > n) {
    throw ValidationError(field, "references x" + std::to_string(k) + " but n = " + std::to_string(n));
  }
  if (const auto k = max_index(e, VarClass::A); k > m) {
    throw ValidationError(field, "references a" + std::to_string(k) + " but m = " + std::to_string(m));
  }
  if (const auto k = max_index(e, VarClass::Y); k > ell) {
    throw ValidationError(field,
                          ell == 0 ? "y-variables are not allowed here"
                                   : "references y" + std::to_string(k) + " but ell = " + std::to_string(ell));
  }
}

}  // namespace

ParamFamily::ParamFamily(std::size_t n, std::size_t m, std::vector<Expr> components,
                         DomainSpec domain, std::optional<unsigned> declared_r)
    : n_(n), m_(m), components_(std::move(components)), domain_(std::move(domain)),
      declared_r_(declared_r) {
  if (n_ == 0) throw ValidationError("dims.n", "must be at least 1");
  if (m_ == 0) throw ValidationError("dims.m", "must be at least 1");
  if (components_.empty()) throw ValidationError("dims.ell", "must be at least 1");
  if (declared_r_ && *declared_r_ == 0) throw ValidationError("dims.r", "must be at least 1");
  if (domain_.x_box.empty()) domain_.x_box.resize(n_);
  if (domain_.a_box.empty()) domain_.a_box.resize(m_);
  if (domain_.x_box.size() != n_) throw ValidationError("domain", "x box arity differs from n");
  if (domain_.a_box.size() != m_) throw ValidationError("domain", "a box arity differs from m");
  for (std::size_t i = 0; i < n_; ++i) check_interval(domain_.x_box[i], "domain.x" + std::to_string(i + 1));
  for (std::size_t j = 0; j < m_; ++j) check_interval(domain_.a_box[j], "domain.a" + std::to_string(j + 1));
  for (const auto& p : domain_.predicates) check_vars(p, n_, m_, 0, "domain.predicate");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    check_vars(components_[i], n_, m_, 0, "family.F" + std::to_string(i + 1));
  }

  jacobian_.reserve(components_.size() * (n_ + m_));
  for (const auto& f : components_) {
    for (std::size_t j = 0; j < n_; ++j) jacobian_.push_back(derive(f, {VarClass::X, j + 1}));
    for (std::size_t j = 0; j < m_; ++j) jacobian_.push_back(derive(f, {VarClass::A, j + 1}));
  }
}

bool ParamFamily::uses_functions() const {
  auto any = [](const std::vector<Expr>& es) {
    return std::any_of(es.begin(), es.end(), [](const Expr& e) { return tvx::uses_functions(e); });
  };
  return any(components_) || any(domain_.predicates);
}

// ---------------------------------------------------------------------------
// SubmanifoldSpec

namespace {

void check_y_only(const Expr& e, std::size_t ell, const std::string& field) {
  if (max_index(e, VarClass::X) > 0 || max_index(e, VarClass::A) > 0) {
    throw ValidationError(field, "may only use y-variables");
  }
  check_vars(e, 0, 0, ell, field);
}

}  // namespace

SubmanifoldSpec SubmanifoldSpec::slice(std::size_t ell, std::vector<std::size_t> zeroed,
                                       std::vector<Expr> constraints) {
  if (ell == 0) throw ValidationError("dims.ell", "must be at least 1");
  std::sort(zeroed.begin(), zeroed.end());
  if (std::adjacent_find(zeroed.begin(), zeroed.end()) != zeroed.end()) {
    throw ValidationError("z.zeroed", "duplicate coordinate index");
  }
  for (auto i : zeroed) {
    if (i == 0 || i > ell) {
      throw ValidationError("z.zeroed", "index " + std::to_string(i) + " outside 1.." + std::to_string(ell));
    }
  }
  for (const auto& c : constraints) check_y_only(c, ell, "z.constraint");
  SubmanifoldSpec z;
  z.kind_ = Kind::Slice;
  z.ell_ = ell;
  z.zeroed_ = std::move(zeroed);
  z.constraints_ = std::move(constraints);
  return z;
}

SubmanifoldSpec SubmanifoldSpec::level_set(std::size_t ell, std::vector<Expr> equations,
                                           std::vector<Expr> constraints) {
  if (ell == 0) throw ValidationError("dims.ell", "must be at least 1");
  if (equations.empty()) {
    throw ValidationError("z.g", "a level set needs at least one equation (q = ell is not allowed)");
  }
  if (equations.size() > ell) throw ValidationError("z.g", "more equations than ell");
  for (const auto& g : equations) check_y_only(g, ell, "z.g");
  for (const auto& c : constraints) check_y_only(c, ell, "z.constraint");
  SubmanifoldSpec z;
  z.kind_ = Kind::LevelSet;
  z.ell_ = ell;
  z.equations_ = std::move(equations);
  z.constraints_ = std::move(constraints);
  for (const auto& g : z.equations_) {
    for (std::size_t j = 0; j < ell; ++j) z.equation_jacobian_.push_back(derive(g, {VarClass::Y, j + 1}));
  }
  return z;
}

std::size_t SubmanifoldSpec::q() const noexcept {
  return ell_ - (is_slice() ? zeroed_.size() : equations_.size());
}

bool SubmanifoldSpec::uses_functions() const {
  auto any = [](const std::vector<Expr>& es) {
    return std::any_of(es.begin(), es.end(), [](const Expr& e) { return tvx::uses_functions(e); });
  };
  return any(equations_) || any(constraints_);
}

// ---------------------------------------------------------------------------
// Membership

bool contains(const DomainSpec& domain, const PointXA& p, const ScalarBackend& backend) {
  if (p.x.size() != domain.x_box.size() || p.a.size() != domain.a_box.size()) {
    throw ValidationError("point", "arity does not match the domain");
  }
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    if (!domain.x_box[i].contains(p.x[i])) return false;
  }
  for (std::size_t j = 0; j < p.a.size(); ++j) {
    if (!domain.a_box[j].contains(p.a[j])) return false;
  }
  if (domain.predicates.empty()) return true;
  if (backend.is_exact()) {
    const Bindings<Rational> b{p.x, p.a, {}};
    return std::all_of(domain.predicates.begin(), domain.predicates.end(),
                       [&](const Expr& e) { return sgn(evaluate(e, b)) > 0; });
  }
  const auto x = to_scalars<double>(p.x);
  const auto a = to_scalars<double>(p.a);
  const Bindings<double> b{x, a, {}};
  const double tol = backend.tolerances().membership;
  return std::all_of(domain.predicates.begin(), domain.predicates.end(),
                     [&](const Expr& e) { return evaluate(e, b) > tol; });
}

namespace {

bool is_zero(const Rational& v, const ScalarBackend&) { return sgn(v) == 0; }
bool is_zero(double v, const ScalarBackend& backend) {
  return std::abs(v) <= backend.tolerances().membership;
}
bool is_positive(const Rational& v, const ScalarBackend&) { return sgn(v) > 0; }
bool is_positive(double v, const ScalarBackend& backend) {
  return v > backend.tolerances().membership;
}

}  // namespace

template <class T>
Membership membership(const SubmanifoldSpec& z, std::span<const T> y, const ScalarBackend& backend) {
  if (y.size() != z.ell()) throw ValidationError("y", "arity differs from ell");
  const Bindings<T> b{{}, {}, y};
  Membership result;
  double margin = std::numeric_limits<double>::infinity();
  auto track = [&](const T& value, bool absolute) {
    if constexpr (std::is_same_v<T, double>) {
      const double tested = absolute ? std::abs(value) : value;
      margin = std::min(margin, std::abs(tested - backend.tolerances().membership));
    }
  };

  bool on = true;
  if (z.is_slice()) {
    for (auto i : z.zeroed()) {
      track(y[i - 1], true);
      on = on && is_zero(y[i - 1], backend);
    }
  } else {
    for (const auto& g : z.equations()) {
      const T v = evaluate(g, b);
      track(v, true);
      on = on && is_zero(v, backend);
    }
  }
  for (const auto& c : z.constraints()) {
    const T v = evaluate(c, b);
    track(v, false);
    on = on && is_positive(v, backend);
  }
  result.on = on;
  if constexpr (std::is_same_v<T, double>) result.margin = margin;
  return result;
}

template <class T>
TangentBasis<T> tangent_of_z(const SubmanifoldSpec& z, std::span<const T> y,
                             const ScalarBackend& backend) {
  const std::size_t ell = z.ell();
  TangentBasis<T> basis;
  basis.ambient_dim = ell;
  if (z.is_slice()) {
    std::vector<std::size_t> free;
    for (std::size_t i = 1, k = 0; i <= ell; ++i) {
      if (k < z.zeroed().size() && z.zeroed()[k] == i) {
        ++k;
      } else {
        free.push_back(i - 1);
      }
    }
    basis.columns = Matrix<T>::identity(ell).select_cols(free);
    return basis;
  }
  const Bindings<T> b{{}, {}, y};
  const std::size_t k = z.equations().size();
  Matrix<T> jg(k, ell);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < ell; ++j) jg(i, j) = evaluate(z.equation_partial(i, j), b);
  if (rank(jg, backend) < k) {
    throw RegularityError("level-set Jacobian is rank-deficient at this point; Z is not a submanifold there");
  }
  basis.columns = kernel_basis(jg, backend);
  return basis;
}

template Membership membership<Rational>(const SubmanifoldSpec&, std::span<const Rational>,
                                         const ScalarBackend&);
template Membership membership<double>(const SubmanifoldSpec&, std::span<const double>,
                                       const ScalarBackend&);
template TangentBasis<Rational> tangent_of_z<Rational>(const SubmanifoldSpec&,
                                                      std::span<const Rational>,
                                                      const ScalarBackend&);
template TangentBasis<double> tangent_of_z<double>(const SubmanifoldSpec&, std::span<const double>,
                                                  const ScalarBackend&);

}  // namespace tvx
