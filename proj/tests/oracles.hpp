#pragma once

// Slow reference implementations used only by the tests.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/energy.hpp"
#include "mmvlab/geometry.hpp"
#include "mmvlab/random.hpp"
#include "mmvlab/space.hpp"
#include "mmvlab/target.hpp"

namespace oracle {

using mmvlab::FiniteMetricMeasureSpace;

// Exact d_GH = min over all correspondences of dis / 2. Tiny spaces only
// (nx * ny <= 16).
inline double gh_exact(const FiniteMetricMeasureSpace& x, const FiniteMetricMeasureSpace& y) {
  const auto nx = x.size();
  const auto ny = y.size();
  const std::size_t cells = nx * ny;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << cells); ++mask) {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (mask & (1u << c)) {
        rows |= 1u << (c / ny);
        cols |= 1u << (c % ny);
      }
    }
    if (rows != (1u << nx) - 1 || cols != (1u << ny) - 1) continue;
    double dis = 0.0;
    for (std::size_t a = 0; a < cells && dis < best * 2; ++a) {
      if (!(mask & (1u << a))) continue;
      for (std::size_t b = 0; b < cells; ++b) {
        if (!(mask & (1u << b))) continue;
        dis = std::max(dis, std::abs(x.distance(a / ny, b / ny) - y.distance(a % ny, b % ny)));
      }
    }
    best = std::min(best, dis / 2.0);
  }
  return best;
}

// K_{c,X}(r) by enumerating every r-separated subset (n <= 16).
inline std::size_t covering_exact(const FiniteMetricMeasureSpace& x, double c, double r) {
  const auto n = x.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool separated = true;
    for (std::size_t i = 0; i < n && separated; ++i)
      for (std::size_t j = i + 1; j < n && separated; ++j)
        if ((mask & (1u << i)) && (mask & (1u << j)) && x.distance(i, j) < r) separated = false;
    if (!separated) continue;
    for (std::size_t z = 0; z < n; ++z) {
      std::size_t count = 0;
      for (std::size_t s = 0; s < n; ++s)
        if ((mask & (1u << s)) && x.distance(s, z) < c * r) ++count;
      best = std::max(best, count);
    }
  }
  return best;
}

// Stiffness L with E(u) = u^T L u, recovered from the energy by polarization.
inline Eigen::MatrixXd stiffness_by_polarization(const mmvlab::EnergyForm& form) {
  const auto n = static_cast<Eigen::Index>(form.domain()->size());
  Eigen::MatrixXd l(n, n);
  Eigen::VectorXd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    diag(i) = mmvlab::energy(form, Eigen::VectorXd(Eigen::VectorXd::Unit(n, i)));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    l(i, i) = diag(i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i) + Eigen::VectorXd::Unit(n, j);
      l(i, j) = l(j, i) = 0.5 * (mmvlab::energy(form, e) - diag(i) - diag(j));
    }
  }
  return l;
}

// argmin_v lambda v^T L v + |v - u|_w^2, i.e. (W + lambda L) v = W u.
inline Eigen::VectorXd dense_resolvent(const Eigen::MatrixXd& l, const Eigen::VectorXd& w,
                                       const Eigen::VectorXd& u, double lambda) {
  Eigen::MatrixXd m = lambda * l;
  m.diagonal() += w;
  return m.ldlt().solve(w.cwiseProduct(u));
}

// exp(-t W^{-1} L) u through the symmetric matrix W^{-1/2} L W^{-1/2}.
inline Eigen::VectorXd dense_heat(const Eigen::MatrixXd& l, const Eigen::VectorXd& w,
                                  const Eigen::VectorXd& u, double t) {
  const Eigen::VectorXd s = w.cwiseSqrt();
  const Eigen::VectorXd si = s.cwiseInverse();
  const Eigen::MatrixXd sym = si.asDiagonal() * l * si.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd decay = (-t * es.eigenvalues().array()).exp().matrix();
  const Eigen::VectorXd z = es.eigenvectors().transpose() * s.cwiseProduct(u);
  return si.cwiseProduct(es.eigenvectors() * decay.cwiseProduct(z));
}

// Generalized eigenvalues of L v = lambda W v, ascending.
inline Eigen::VectorXd dense_spectrum(const Eigen::MatrixXd& l, const Eigen::VectorXd& w) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::MatrixXd(w.asDiagonal()));
  return es.eigenvalues();
}

// Grid minimizer of the Fréchet objective over every edge of a tree target.
inline mmvlab::TreePoint tree_grid_mean(const mmvlab::TargetSpace& y,
                                        std::span<const mmvlab::TargetPoint> points,
                                        std::span<const double> weights, double step) {
  const auto& tree = y.metric_tree();
  double best = std::numeric_limits<double>::infinity();
  mmvlab::TreePoint arg{};
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    const double len = tree.edge(e).length;
    const auto steps = static_cast<std::size_t>(std::ceil(len / step));
    for (std::size_t s = 0; s <= steps; ++s) {
      const mmvlab::TreePoint q{e, std::min(len, static_cast<double>(s) * step)};
      const double f = mmvlab::frechet_objective(y, mmvlab::TargetPoint(q), points, weights);
      if (f < best) {
        best = f;
        arg = q;
      }
    }
  }
  return arg;
}

// min over a fine parameter grid of d(x, geodesic(a, b, t)).
inline double segment_distance_grid(const mmvlab::TargetSpace& y, const mmvlab::TargetPoint& x,
                                    const mmvlab::TargetPoint& a, const mmvlab::TargetPoint& b,
                                    std::size_t steps = 20000) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(steps);
    best = std::min(best, y.distance(x, mmvlab::geodesic(y, a, b, t)));
  }
  return best;
}

inline FiniteMetricMeasureSpace random_planar(std::size_t n, std::mt19937_64& rng) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < 2; ++j) pts(i, j) = mmvlab::uniform01(rng);
  return FiniteMetricMeasureSpace::validated(
      mmvlab::coordinate_metric(pts, "l2"),
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

}  // namespace oracle
