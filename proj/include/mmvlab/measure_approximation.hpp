#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/space.hpp"

namespace mmvlab {

/// A partial index map phi: Dom(phi) ⊂ source -> target with the pushforward
/// of the source measure recorded on the target.
class MeasureApproximation {
 public:
  MeasureApproximation(SpacePtr source, SpacePtr target,
                       std::vector<std::optional<std::size_t>> map);

  static MeasureApproximation identity(SpacePtr space);

  const SpacePtr& source() const { return source_; }
  const SpacePtr& target() const { return target_; }
  const std::vector<std::optional<std::size_t>>& map() const { return map_; }
  std::optional<std::size_t> operator()(std::size_t x) const { return map_[x]; }
  /// Dom(phi), ascending.
  std::vector<std::size_t> domain() const;
  /// Weight of each target point: sum of the source weights mapped onto it.
  const Eigen::VectorXd& pushforward_weight() const { return pushforward_; }
  /// Same map restricted to `keep` (indices outside keep become undefined).
  MeasureApproximation restricted(const std::vector<std::size_t>& keep) const;

 private:
  SpacePtr source_;
  SpacePtr target_;
  std::vector<std::optional<std::size_t>> map_;
  Eigen::VectorXd pushforward_;
};

/// Nearest target point in model coordinates; both spaces need the same
/// chart. Ties go to the lowest index, except on periodic charts where a tie
/// goes to the candidate lying clockwise (smaller signed angle), so that
/// refinements of a circle are rounded consistently all the way around.
MeasureApproximation nearest_point_map(SpacePtr source, SpacePtr target);

}  // namespace mmvlab
