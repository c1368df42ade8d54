#include "mmvlab/space.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

FiniteMetricMeasureSpace::FiniteMetricMeasureSpace(Eigen::MatrixXd dist, Eigen::VectorXd weight,
                                                   std::string label)
    : dist_(std::move(dist)), weight_(std::move(weight)), label_(std::move(label)) {
  diameter_ = dist_.size() == 0 ? 0.0 : dist_.maxCoeff();
}

void FiniteMetricMeasureSpace::check_basic(const Eigen::MatrixXd& dist,
                                           const Eigen::VectorXd& weight) {
  const auto n = weight.size();
  if (n == 0) throw InvalidSpace("space must contain at least one point");
  if (dist.rows() != n || dist.cols() != n) {
    throw InvalidSpace(fmt::format("distance matrix is {}x{} but there are {} weights",
                                   dist.rows(), dist.cols(), n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weight(i) > 0.0) || !std::isfinite(weight(i))) {
      throw InvalidSpace(fmt::format("nonpositive weight {} at index {}", weight(i), i));
    }
  }
  const double diam = dist.maxCoeff();
  const double tol = 1e-12 * std::max(diam, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) {
      throw InvalidSpace(fmt::format("nonzero diagonal entry {} at ({}, {})", dist(i, i), i, i));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!std::isfinite(dist(i, j)) || dist(i, j) < 0.0) {
        throw InvalidSpace(fmt::format("invalid distance {} at ({}, {})", dist(i, j), i, j));
      }
      if (std::abs(dist(i, j) - dist(j, i)) > tol) {
        throw InvalidSpace(fmt::format("asymmetric matrix: d({0},{1}) = {2} but d({1},{0}) = {3}",
                                       i, j, dist(i, j), dist(j, i)));
      }
    }
  }
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::validated(Eigen::MatrixXd dist,
                                                             Eigen::VectorXd weight,
                                                             std::string label) {
  check_basic(dist, weight);
  const auto n = weight.size();
  const double tol = 1e-12 * std::max(dist.maxCoeff(), 1.0);
  // d(i,k) <= d(i,j) + d(j,k), one pivot column at a time
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double djk = dist(j, k);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (dist(i, k) > dist(i, j) + djk + tol) {
          throw InvalidSpace(fmt::format(
              "triangle violation: d({0},{2}) = {3} > d({0},{1}) + d({1},{2}) = {4}", i, j, k,
              dist(i, k), dist(i, j) + djk));
        }
      }
    }
  }
  return FiniteMetricMeasureSpace(std::move(dist), std::move(weight), std::move(label));
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::trusted(Eigen::MatrixXd dist,
                                                           Eigen::VectorXd weight,
                                                           std::string label) {
  check_basic(dist, weight);
  return FiniteMetricMeasureSpace(std::move(dist), std::move(weight), std::move(label));
}

double FiniteMetricMeasureSpace::mass(std::span<const std::size_t> subset) const {
  double m = 0.0;
  for (auto i : subset) m += weight_(i);
  return m;
}

double FiniteMetricMeasureSpace::min_positive_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < dist_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < dist_.cols(); ++j)
      if (dist_(i, j) > 0.0) best = std::min(best, dist_(i, j));
  return best;
}

std::vector<std::size_t> FiniteMetricMeasureSpace::ball(std::size_t x, double r) const {
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < size(); ++y)
    if (dist_(x, y) < r) out.push_back(y);
  return out;
}

double FiniteMetricMeasureSpace::ball_mass(std::size_t x, double r) const {
  double m = 0.0;
  for (std::size_t y = 0; y < size(); ++y)
    if (dist_(x, y) < r) m += weight_(y);
  return m;
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::with_coords(Eigen::MatrixXd coords, Chart chart,
                                                               double period) const {
  if (chart != Chart::None && coords.rows() != static_cast<Eigen::Index>(size())) {
    throw InvalidArgument("coordinate table must have one row per point");
  }
  FiniteMetricMeasureSpace out = *this;
  out.coords_ = std::move(coords);
  out.chart_ = chart;
  out.period_ = period;
  return out;
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::with_label(std::string label) const {
  FiniteMetricMeasureSpace out = *this;
  out.label_ = std::move(label);
  return out;
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::with_weights(Eigen::VectorXd weight) const {
  check_basic(dist_, weight);
  FiniteMetricMeasureSpace out = *this;
  out.weight_ = std::move(weight);
  return out;
}

double FiniteMetricMeasureSpace::chart_distance(Chart chart, double period,
                                                const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& b) {
  switch (chart) {
    case Chart::Euclidean:
      return (a - b).norm();
    case Chart::Periodic: {
      double d = std::fmod(std::abs(a(0) - b(0)), period);
      return std::min(d, period - d);
    }
    case Chart::None:
      break;
  }
  throw InvalidArgument("space carries no model coordinates");
}

Eigen::MatrixXd coordinate_metric(const Eigen::MatrixXd& coords, const std::string& metric) {
  const auto n = coords.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const bool linf = metric == "linf";
  if (!linf && metric != "l2") throw InvalidArgument("metric must be \"l2\" or \"linf\"");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto diff = coords.row(i) - coords.row(j);
      const double v = linf ? diff.cwiseAbs().maxCoeff() : diff.norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace mmvlab
