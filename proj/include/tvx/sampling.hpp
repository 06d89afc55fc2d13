#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tvx/geometry.hpp"
#include "tvx/rational.hpp"

namespace tvx {

/// Closed sampling interval [lower, upper].
struct ClosedInterval {
  Rational lower;
  Rational upper;

  friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

enum class SamplingMode { Grid, MonteCarlo };

/// How parameter and source points are drawn.
///
/// Grid mode: `x_count` / `a_count` points per axis, endpoints included; the
/// x-grid additionally contains 0 and the box midpoint on every axis (when
/// inside the box). Monte Carlo mode: `x_count` / `a_count` points in total,
/// each coordinate drawn from a counter-based generator keyed by
/// (seed, stream, sample index, coordinate); the x-samples are followed by the
/// all-zero point and the box centre.
struct SamplingPlan {
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::Grid;
  std::vector<ClosedInterval> x_box;
  std::vector<ClosedInterval> a_box;
  std::size_t x_count = 1;
  std::size_t a_count = 1;
  Rational eps_alpha = 0;
  Rational eps_beta = 0;

  friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

/// Throws ValidationError when counts are zero, boxes are inverted, arities
/// differ from (n, m), or a box leaves the domain's open box.
void validate_plan(const SamplingPlan& plan, const DomainSpec& domain);

using Sample = std::vector<Rational>;

std::vector<Sample> x_samples(const SamplingPlan& plan);
std::vector<Sample> a_samples(const SamplingPlan& plan);

/// `count` equally spaced points on [lower, upper], endpoints included.
std::vector<Rational> grid_axis(const ClosedInterval& box, std::size_t count);

/// Cartesian product of per-axis values; the last axis varies fastest.
std::vector<Sample> cartesian(const std::vector<std::vector<Rational>>& axes);

/// Uniform rational in the open unit interval: (2k+1) / 2^33 with k drawn from
/// a SplitMix64 hash of the key.
Rational unit_sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                     std::uint64_t coordinate);

}  // namespace tvx
