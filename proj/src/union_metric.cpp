#include "mmvlab/union_metric.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

UnionMetric UnionMetric::build(const std::vector<SpacePtr>& blocks, SpacePtr limit,
                               const std::vector<LandmarkTable>& tables) {
  if (!limit) throw InvalidArgument("union metric needs a limit space");
  if (tables.size() != blocks.size()) {
    throw InvalidArgument("one landmark table per block is required");
  }
  UnionMetric u;
  u.offsets_.push_back(0);
  for (const auto& b : blocks) u.offsets_.push_back(u.offsets_.back() + b->size());
  u.offsets_.push_back(u.offsets_.back() + limit->size());
  const auto total = static_cast<Eigen::Index>(u.offsets_.back());
  const auto lim_off = u.offsets_[blocks.size()];
  u.dist_ = Eigen::MatrixXd::Zero(total, total);
  u.weight_ = Eigen::VectorXd(total);

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& t = tables[b];
    const auto& blk = *blocks[b];
    if (t.pairs.empty()) throw InvalidArgument(fmt::format("block {} has no landmarks", b));
    if (t.precision == 0) throw InvalidArgument("landmark precision N(i) must be >= 1");
    const double eps = 1.0 / static_cast<double>(t.precision);
    for (auto [p, q] : t.pairs) {
      if (p >= blk.size() || q >= limit->size()) {
        throw InvalidArgument(fmt::format("landmark ({}, {}) out of range in block {}", p, q, b));
      }
    }
    for (auto [pm, qm] : t.pairs) {
      for (auto [pn, qn] : t.pairs) {
        const double gap = std::abs(blk.distance(pm, pn) - limit->distance(qm, qn));
        if (!(gap < eps)) {
          throw InvalidArgument(fmt::format(
              "block {}: landmarks ({}, {}) and ({}, {}) disagree by {} >= 1/N = {}", b, pm, qm,
              pn, qn, gap, eps));
        }
      }
    }
  }

  // limit-limit and block-block
  u.dist_.block(static_cast<Eigen::Index>(lim_off), static_cast<Eigen::Index>(lim_off),
                static_cast<Eigen::Index>(limit->size()), static_cast<Eigen::Index>(limit->size())) =
      limit->dist();
  u.weight_.segment(static_cast<Eigen::Index>(lim_off), static_cast<Eigen::Index>(limit->size())) =
      limit->weight();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto off = static_cast<Eigen::Index>(u.offsets_[b]);
    const auto nb = static_cast<Eigen::Index>(blocks[b]->size());
    u.dist_.block(off, off, nb, nb) = blocks[b]->dist();
    u.weight_.segment(off, nb) = blocks[b]->weight();
  }

  // block-limit through the landmarks
  std::vector<Eigen::MatrixXd> cross(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = *blocks[b];
    const double eps = 1.0 / static_cast<double>(tables[b].precision);
    auto& c = cross[b];
    c = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(blk.size()),
                                  static_cast<Eigen::Index>(limit->size()),
                                  std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < blk.size(); ++x) {
      for (std::size_t y = 0; y < limit->size(); ++y) {
        for (auto [p, q] : tables[b].pairs) {
          const double v = blk.distance(x, p) + limit->distance(y, q) + eps;
          if (v < c(x, y)) c(x, y) = v;
        }
      }
    }
    const auto off = static_cast<Eigen::Index>(u.offsets_[b]);
    u.dist_.block(off, static_cast<Eigen::Index>(lim_off), c.rows(), c.cols()) = c;
    u.dist_.block(static_cast<Eigen::Index>(lim_off), off, c.cols(), c.rows()) = c.transpose();
  }

  // block-block through the limit space
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      const auto& ca = cross[a];
      const auto& cb = cross[b];
      Eigen::MatrixXd m(ca.rows(), cb.rows());
      for (Eigen::Index x = 0; x < ca.rows(); ++x)
        for (Eigen::Index y = 0; y < cb.rows(); ++y)
          m(x, y) = (ca.row(x) + cb.row(y)).minCoeff();
      const auto oa = static_cast<Eigen::Index>(u.offsets_[a]);
      const auto ob = static_cast<Eigen::Index>(u.offsets_[b]);
      u.dist_.block(oa, ob, m.rows(), m.cols()) = m;
      u.dist_.block(ob, oa, m.cols(), m.rows()) = m.transpose();
    }
  }
  return u;
}

FiniteMetricMeasureSpace UnionMetric::as_space() const {
  return FiniteMetricMeasureSpace::trusted(dist_, weight_, "union");
}

}  // namespace mmvlab
