#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/space.hpp"
#include "mmvlab/tree.hpp"

namespace mmvlab {

/// A point of a target space. The alternative in use matches the target
/// kind: coordinates (Euclidean), a tree point, an index (finite metric), or
/// one point per factor (product).
struct TargetPoint {
  std::variant<Eigen::VectorXd, TreePoint, std::size_t, std::vector<TargetPoint>> value;

  TargetPoint() = default;
  TargetPoint(Eigen::VectorXd v) : value(std::move(v)) {}
  TargetPoint(TreePoint p) : value(p) {}
  TargetPoint(std::size_t i) : value(i) {}
  TargetPoint(std::vector<TargetPoint> parts) : value(std::move(parts)) {}

  static TargetPoint real(double x) { return TargetPoint(Eigen::VectorXd::Constant(1, x)); }

  const Eigen::VectorXd& coords() const { return std::get<Eigen::VectorXd>(value); }
  const TreePoint& tree_point() const { return std::get<TreePoint>(value); }
  std::size_t index() const { return std::get<std::size_t>(value); }
  const std::vector<TargetPoint>& parts() const { return std::get<std::vector<TargetPoint>>(value); }
};

class TargetSpace;
using TargetPtr = std::shared_ptr<const TargetSpace>;

/// A pointed metric target (Y, y0). Euclidean, Tree and Product targets are
/// CAT(0) and carry geodesics; FiniteMetric targets only carry a distance.
class TargetSpace {
 public:
  enum class Kind { Euclidean, Tree, FiniteMetric, Product };

  static TargetPtr euclidean(std::size_t dim);
  static TargetPtr real() { return euclidean(1); }
  static TargetPtr tree(std::shared_ptr<const MetricTree> tree, TreePoint basepoint = {});
  static TargetPtr finite(SpacePtr space, std::size_t basepoint = 0);
  /// l2 combination of the factor distances.
  static TargetPtr product(std::vector<TargetPtr> factors);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const MetricTree& metric_tree() const { return *tree_; }
  const std::shared_ptr<const MetricTree>& tree_ptr() const { return tree_; }
  const FiniteMetricMeasureSpace& finite_space() const { return *finite_; }
  const SpacePtr& finite_ptr() const { return finite_; }
  const std::vector<TargetPtr>& factors() const { return factors_; }
  const TargetPoint& basepoint() const { return basepoint_; }
  bool has_geodesics() const;
  std::string describe() const;

  double distance(const TargetPoint& a, const TargetPoint& b) const;
  /// Throws InvalidArgument unless `p` is a valid point of this target.
  void check(const TargetPoint& p) const;

 private:
  TargetSpace() = default;

  Kind kind_ = Kind::Euclidean;
  std::size_t dim_ = 0;
  std::shared_ptr<const MetricTree> tree_;
  SpacePtr finite_;
  std::vector<TargetPtr> factors_;
  TargetPoint basepoint_;
};

}  // namespace mmvlab
