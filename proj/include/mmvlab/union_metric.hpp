#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/space.hpp"

namespace mmvlab {

/// Landmarks p_{n,i} in a block matched to p_n in the limit space, promised
/// to agree to within 1/precision in all pairwise distances.
struct LandmarkTable {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (block index, limit index)
  std::size_t precision = 1;                               // N(i)
};

/// Metric on the disjoint union X_1 ⊔ ... ⊔ X_m ⊔ X. A block point x and a
/// limit point y are at distance min_n d(x, p_{n,i}) + d(y, p_n) + 1/N(i);
/// two points in different blocks are joined through the limit space.
class UnionMetric {
 public:
  /// Throws InvalidArgument when a landmark table breaks its precision promise.
  static UnionMetric build(const std::vector<SpacePtr>& blocks, SpacePtr limit,
                           const std::vector<LandmarkTable>& tables);

  const Eigen::MatrixXd& dist() const { return dist_; }
  std::size_t block_count() const { return offsets_.size() - 1; }
  /// Row of point k of block b (b == block_count() addresses the limit space).
  std::size_t global_index(std::size_t block, std::size_t k) const { return offsets_[block] + k; }
  std::size_t size() const { return static_cast<std::size_t>(dist_.rows()); }
  /// The union as a space carrying the blocks' weights.
  FiniteMetricMeasureSpace as_space() const;

 private:
  Eigen::MatrixXd dist_;
  Eigen::VectorXd weight_;
  std::vector<std::size_t> offsets_;
};

}  // namespace mmvlab
