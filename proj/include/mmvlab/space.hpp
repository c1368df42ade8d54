#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mmvlab {

// How model coordinates attached to a sampled space should be compared.
enum class Chart {
  None,       // no coordinates
  Euclidean,  // rows are points of R^m with the l2 norm
  Periodic,   // single column, angle-like coordinate modulo `period`
};

/// A finite metric space with a full-support measure: the discrete
/// stand-in for a compact measured metric space.
///
/// Instances are immutable. Construct them with `validated()` (full metric
/// axiom check) or through the samplers, which build metrics that satisfy
/// the axioms by construction.
class FiniteMetricMeasureSpace {
 public:
  /// Checks symmetry, zero diagonal, the triangle inequality (relative
  /// tolerance 1e-12 of the diameter) and strict positivity of the weights.
  /// Throws InvalidSpace naming the offending indices.
  static FiniteMetricMeasureSpace validated(Eigen::MatrixXd dist, Eigen::VectorXd weight,
                                            std::string label = {});

  /// Skips the O(n^3) triangle check. For metrics that hold by construction
  /// (coordinate metrics, tree path metrics, shortest paths).
  static FiniteMetricMeasureSpace trusted(Eigen::MatrixXd dist, Eigen::VectorXd weight,
                                          std::string label = {});

  std::size_t size() const { return static_cast<std::size_t>(weight_.size()); }
  double distance(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const Eigen::MatrixXd& dist() const { return dist_; }
  const Eigen::VectorXd& weight() const { return weight_; }
  double weight(std::size_t i) const { return weight_(i); }
  const std::string& label() const { return label_; }

  double mass() const { return weight_.sum(); }
  double mass(std::span<const std::size_t> subset) const;
  double diameter() const { return diameter_; }
  double min_positive_distance() const;

  /// Indices of the open ball B(x, r) = {y : d(x,y) < r}, ascending.
  std::vector<std::size_t> ball(std::size_t x, double r) const;
  double ball_mass(std::size_t x, double r) const;

  /// Model coordinates (samplers fill these in); empty when chart == None.
  const Eigen::MatrixXd& coords() const { return coords_; }
  Chart chart() const { return chart_; }
  double period() const { return period_; }

  FiniteMetricMeasureSpace with_coords(Eigen::MatrixXd coords, Chart chart,
                                       double period = 0.0) const;
  FiniteMetricMeasureSpace with_label(std::string label) const;
  FiniteMetricMeasureSpace with_weights(Eigen::VectorXd weight) const;

  /// Distance between two coordinate rows under this space's chart.
  static double chart_distance(Chart chart, double period, const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b);

 private:
  FiniteMetricMeasureSpace(Eigen::MatrixXd dist, Eigen::VectorXd weight, std::string label);
  static void check_basic(const Eigen::MatrixXd& dist, const Eigen::VectorXd& weight);

  Eigen::MatrixXd dist_;
  Eigen::VectorXd weight_;
  std::string label_;
  double diameter_ = 0.0;
  Eigen::MatrixXd coords_;
  Chart chart_ = Chart::None;
  double period_ = 0.0;
};

using SpacePtr = std::shared_ptr<const FiniteMetricMeasureSpace>;

inline SpacePtr share(FiniteMetricMeasureSpace space) {
  return std::make_shared<const FiniteMetricMeasureSpace>(std::move(space));
}

/// Metric computed from coordinate rows, "l2" or "linf".
Eigen::MatrixXd coordinate_metric(const Eigen::MatrixXd& coords, const std::string& metric);

}  // namespace mmvlab
