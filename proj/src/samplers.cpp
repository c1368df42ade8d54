#include "mmvlab/samplers.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

namespace {

Eigen::VectorXd uniform_weights(std::size_t n) {
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("{} must be positive, got {}", what, v));
  }
}

}  // namespace

FiniteMetricMeasureSpace sample_circle(std::size_t n, double circumference) {
  if (n == 0) throw InvalidArgument("sample_circle needs n >= 1");
  require_positive(circumference, "circumference");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd angle(N, 1);
  for (Eigen::Index i = 0; i < N; ++i) angle(i, 0) = circumference * static_cast<double>(i) / static_cast<double>(n);
  Eigen::MatrixXd d(N, N);
  // Integer arithmetic on index differences keeps rotations exact isometries.
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto k = std::abs(i - j);
      const auto steps = std::min(k, N - k);
      d(i, j) = circumference * static_cast<double>(steps) / static_cast<double>(n);
    }
  }
  return FiniteMetricMeasureSpace::trusted(std::move(d), uniform_weights(n),
                                           fmt::format("circle({},{})", n, circumference))
      .with_coords(std::move(angle), Chart::Periodic, circumference);
}

FiniteMetricMeasureSpace sample_interval(std::size_t n, double length) {
  if (n == 0) throw InvalidArgument("sample_interval needs n >= 1");
  require_positive(length, "length");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd x(N, 1);
  const double h = n == 1 ? 0.0 : length / static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < N; ++i) x(i, 0) = h * static_cast<double>(i);
  Eigen::MatrixXd d(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) d(i, j) = h * static_cast<double>(std::abs(i - j));
  return FiniteMetricMeasureSpace::trusted(std::move(d), uniform_weights(n),
                                           fmt::format("interval({},{})", n, length))
      .with_coords(std::move(x), Chart::Euclidean);
}

FiniteMetricMeasureSpace sample_cube(const std::vector<std::size_t>& points,
                                     const std::vector<double>& sides) {
  if (points.empty() || points.size() != sides.size()) {
    throw InvalidArgument("sample_cube needs one grid size per side length");
  }
  std::size_t n = 1;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k] == 0) throw InvalidArgument("grid sizes must be >= 1");
    require_positive(sides[k], "side length");
    n *= points[k];
  }
  const auto dim = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(n), dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i;
    // last axis varies fastest
    for (auto k = dim - 1; k >= 0; --k) {
      const auto m = points[static_cast<std::size_t>(k)];
      const auto idx = rem % m;
      rem /= m;
      const double h = m == 1 ? 0.0 : sides[static_cast<std::size_t>(k)] / static_cast<double>(m - 1);
      coords(static_cast<Eigen::Index>(i), k) = h * static_cast<double>(idx);
    }
  }
  std::string label = "cube(";
  for (std::size_t k = 0; k < points.size(); ++k) {
    label += fmt::format("{}{}:{}", k ? "," : "", points[k], sides[k]);
  }
  label += ")";
  return FiniteMetricMeasureSpace::trusted(coordinate_metric(coords, "l2"), uniform_weights(n),
                                           std::move(label))
      .with_coords(std::move(coords), Chart::Euclidean);
}

FiniteMetricMeasureSpace sample_qcube(std::size_t dim, std::size_t per_unit) {
  if (dim == 0) throw InvalidArgument("Q-cube dimension must be >= 1");
  if (per_unit == 0) throw InvalidArgument("grid resolution must be >= 1");
  std::vector<std::size_t> points;
  std::vector<double> sides;
  double side = 1.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const auto intervals = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(side * static_cast<double>(per_unit))));
    points.push_back(intervals + 1);
    sides.push_back(side);
    side *= 0.5;
  }
  return sample_cube(points, sides).with_label(fmt::format("Q_{}({})", dim, per_unit));
}

std::vector<TreePoint> tree_sample_points(const MetricTree& tree, std::size_t interior_per_edge) {
  std::vector<TreePoint> pts;
  for (std::size_t v = 0; v < tree.vertex_count(); ++v) pts.push_back(tree.vertex_point(v));
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    const double len = tree.edge(e).length;
    for (std::size_t k = 1; k <= interior_per_edge; ++k) {
      pts.push_back({e, len * static_cast<double>(k) / static_cast<double>(interior_per_edge + 1)});
    }
  }
  return pts;
}

FiniteMetricMeasureSpace sample_tree(const std::vector<TreeEdge>& edges,
                                     std::size_t interior_per_edge) {
  const MetricTree tree(edges);
  const auto pts = tree_sample_points(tree, interior_per_edge);
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = tree.distance(pts[i], pts[j]);
  // symmetrize exactly; the two evaluation orders may differ in the last bit
  d = 0.5 * (d + d.transpose()).eval();
  return FiniteMetricMeasureSpace::trusted(std::move(d), uniform_weights(pts.size()),
                                           fmt::format("tree({} edges,{})", edges.size(),
                                                       interior_per_edge));
}

}  // namespace mmvlab
