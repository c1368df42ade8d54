#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mmvlab/space.hpp"

namespace mmvlab {

/// A relation R between the index sets of X and Y. A correspondence must
/// project onto both index sets.
struct Correspondence {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  /// Graph of f: X -> Y together with the transposed graph of g: Y -> X.
  static Correspondence from_maps(std::span<const std::size_t> f, std::span<const std::size_t> g);
  bool is_surjective(std::size_t nx, std::size_t ny) const;
};

/// sup |d_Y(y,y') - d_X(x,x')| over pairs of related pairs. Requires the
/// relation to be a correspondence.
double distortion(const Correspondence& r, const FiniteMetricMeasureSpace& x,
                  const FiniteMetricMeasureSpace& y);

/// sup |d_Y(f x, f x') - d_X(x,x')| for a total map given as an index table.
double distortion(std::span<const std::size_t> map, const FiniteMetricMeasureSpace& x,
                  const FiniteMetricMeasureSpace& y);

/// dis f < eps and every point of Y lies within (open) distance eps of f(X).
bool is_eps_approximation(std::span<const std::size_t> map, const FiniteMetricMeasureSpace& x,
                          const FiniteMetricMeasureSpace& y, double eps);

struct GhSearchBudget {
  std::size_t iterations = 1000;    // hill-climbing moves across all restarts
  std::size_t candidate_cap = 128;  // reassignment candidates examined per move
  std::size_t landmark_cap = 64;    // landmarks consulted by the greedy seeding
  std::uint64_t seed = 0;
};

struct GhUpperBound {
  double bound = 0.0;  // dis(witness) / 2
  Correspondence witness;
  std::size_t restarts = 0;
};

/// Upper bound on d_GH via an explicit correspondence: greedy landmark
/// seeding followed by reassignment/swap hill climbing with restarts. The
/// search is one deterministic stream truncated at the budget, so the bound
/// is nonincreasing in `iterations` for a fixed seed.
GhUpperBound gh_upper(const FiniteMetricMeasureSpace& x, const FiniteMetricMeasureSpace& y,
                      const GhSearchBudget& budget = {});

/// Certified lower bound: max of the diameter bound, the eccentricity bound
/// and the local distance-distribution bound (each at most d_GH).
double gh_lower(const FiniteMetricMeasureSpace& x, const FiniteMetricMeasureSpace& y);

/// Hausdorff distance between two nonempty index subsets of z.
double hausdorff_distance(const FiniteMetricMeasureSpace& z, std::span<const std::size_t> a,
                          std::span<const std::size_t> b);

}  // namespace mmvlab
