#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/space.hpp"

namespace mmvlab {

/// Greedy maximal r-discrete net: pairwise distances >= r and no point can
/// be added. Points are scanned in index order when `seed` is empty,
/// otherwise in a seed-determined permutation.
std::vector<std::size_t> maximal_r_discrete_net(const FiniteMetricMeasureSpace& x, double r,
                                                std::optional<std::uint64_t> seed = std::nullopt);

struct CoveringOrderOptions {
  enum class Mode { Exhaustive, Randomized };
  Mode mode = Mode::Exhaustive;
  std::size_t budget = 200;  // sampled nets in randomized mode
  std::uint64_t seed = 0;
  std::size_t exhaustive_cap = 16;  // largest n accepted in exhaustive mode
};

/// Local covering order K_{c,X}(r): the largest number of open balls
/// B(s, c r) containing a common point, over r-discrete sets {s}.
/// Exhaustive mode is exact; randomized mode is a lower bound (max over
/// sampled maximal nets).
std::size_t covering_order(const FiniteMetricMeasureSpace& x, double c, double r,
                           const CoveringOrderOptions& options = {});

/// Nearest point of `subset` for every point of z (lowest index on ties).
std::vector<std::size_t> project_onto_subset(const FiniteMetricMeasureSpace& z,
                                             std::span<const std::size_t> subset);

/// Row i is d(x_i, .) - d(x_anchor, .); sup-norm distances between rows
/// reproduce the metric.
Eigen::MatrixXd kuratowski_embed(const FiniteMetricMeasureSpace& x, std::size_t anchor);

}  // namespace mmvlab
