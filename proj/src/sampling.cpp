#include "tvx/sampling.hpp"

#include <algorithm>

namespace tvx {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

constexpr std::uint64_t kStreamX = 1;
constexpr std::uint64_t kStreamA = 2;

void check_box(const std::vector<ClosedInterval>& box, const std::vector<OpenInterval>& domain,
               char cls) {
  if (box.size() != domain.size()) {
    throw ValidationError(std::string("plan.") + cls, "box arity " + std::to_string(box.size()) +
                                                         " differs from dimension " +
                                                         std::to_string(domain.size()));
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    const std::string field = std::string("plan.") + cls + std::to_string(i + 1);
    if (box[i].lower > box[i].upper) throw ValidationError(field, "inverted interval");
    if (!domain[i].contains(box[i].lower) || !domain[i].contains(box[i].upper)) {
      throw ValidationError(field, "sampling box leaves the domain box");
    }
  }
}

std::vector<Sample> monte_carlo(const std::vector<ClosedInterval>& box, std::size_t count,
                                std::uint64_t seed, std::uint64_t stream) {
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Sample s;
    s.reserve(box.size());
    for (std::size_t c = 0; c < box.size(); ++c) {
      const Rational u = unit_sample(seed, stream, k, c);
      s.push_back(Rational(box[c].lower + (box[c].upper - box[c].lower) * u));
    }
    out.push_back(std::move(s));
  }
  return out;
}

Rational midpoint(const ClosedInterval& iv) { return Rational((iv.lower + iv.upper) / 2); }

}  // namespace

Rational unit_sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                     std::uint64_t coordinate) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ coordinate);
  const std::uint64_t k = h >> 32U;  // 32 random bits
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, 33);
  Rational u(mpz_class(2) * mpz_class(static_cast<unsigned long>(k)) + 1, den);
  u.canonicalize();
  return u;
}

void validate_plan(const SamplingPlan& plan, const DomainSpec& domain) {
  if (plan.x_count == 0) throw ValidationError("plan.x_count", "must be at least 1");
  if (plan.a_count == 0) throw ValidationError("plan.a_count", "must be at least 1");
  if (plan.eps_alpha < 0) throw ValidationError("plan.eps_alpha", "must be non-negative");
  if (plan.eps_beta < 0) throw ValidationError("plan.eps_beta", "must be non-negative");
  check_box(plan.x_box, domain.x_box, 'x');
  check_box(plan.a_box, domain.a_box, 'a');
}

std::vector<Rational> grid_axis(const ClosedInterval& box, std::size_t count) {
  std::vector<Rational> out;
  if (count == 0) return out;
  if (count == 1) {
    out.push_back(midpoint(box));
    return out;
  }
  out.reserve(count);
  const Rational step = (box.upper - box.lower) / Rational(static_cast<long>(count - 1));
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(Rational(box.lower + step * Rational(static_cast<long>(k))));
  }
  out.back() = box.upper;
  return out;
}

std::vector<Sample> cartesian(const std::vector<std::vector<Rational>>& axes) {
  std::vector<Sample> out{Sample{}};
  for (const auto& axis : axes) {
    std::vector<Sample> next;
    next.reserve(out.size() * axis.size());
    for (const auto& prefix : out) {
      for (const auto& v : axis) {
        Sample s = prefix;
        s.push_back(v);
        next.push_back(std::move(s));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Sample> x_samples(const SamplingPlan& plan) {
  if (plan.mode == SamplingMode::MonteCarlo) {
    auto out = monte_carlo(plan.x_box, plan.x_count, plan.seed, kStreamX);
    Sample zero(plan.x_box.size(), Rational(0));
    Sample centre;
    bool zero_inside = true;
    for (const auto& iv : plan.x_box) {
      centre.push_back(midpoint(iv));
      zero_inside = zero_inside && iv.lower <= 0 && 0 <= iv.upper;
    }
    if (zero_inside) out.push_back(zero);
    if (!zero_inside || centre != zero) out.push_back(centre);
    return out;
  }
  std::vector<std::vector<Rational>> axes;
  for (const auto& iv : plan.x_box) {
    auto axis = grid_axis(iv, plan.x_count);
    axis.push_back(midpoint(iv));
    if (iv.lower <= 0 && 0 <= iv.upper) axis.push_back(Rational(0));
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    axes.push_back(std::move(axis));
  }
  return cartesian(axes);
}

std::vector<Sample> a_samples(const SamplingPlan& plan) {
  if (plan.mode == SamplingMode::MonteCarlo) {
    return monte_carlo(plan.a_box, plan.a_count, plan.seed, kStreamA);
  }
  std::vector<std::vector<Rational>> axes;
  for (const auto& iv : plan.a_box) axes.push_back(grid_axis(iv, plan.a_count));
  return cartesian(axes);
}

}  // namespace tvx
