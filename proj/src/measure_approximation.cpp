#include "mmvlab/measure_approximation.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

MeasureApproximation::MeasureApproximation(SpacePtr source, SpacePtr target,
                                           std::vector<std::optional<std::size_t>> map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(map)) {
  if (!source_ || !target_) throw InvalidArgument("measure approximation needs both spaces");
  if (map_.size() != source_->size()) {
    throw InvalidArgument(fmt::format("map has {} entries for a source of {} points", map_.size(),
                                      source_->size()));
  }
  pushforward_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target_->size()));
  for (std::size_t x = 0; x < map_.size(); ++x) {
    if (!map_[x]) continue;
    if (*map_[x] >= target_->size()) {
      throw InvalidArgument(fmt::format("map sends {} to {}, out of range", x, *map_[x]));
    }
    pushforward_(static_cast<Eigen::Index>(*map_[x])) += source_->weight(x);
  }
}

MeasureApproximation MeasureApproximation::identity(SpacePtr space) {
  std::vector<std::optional<std::size_t>> m(space->size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = i;
  return MeasureApproximation(space, space, std::move(m));
}

std::vector<std::size_t> MeasureApproximation::domain() const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < map_.size(); ++x)
    if (map_[x]) out.push_back(x);
  return out;
}

MeasureApproximation MeasureApproximation::restricted(const std::vector<std::size_t>& keep) const {
  std::vector<std::optional<std::size_t>> m(map_.size());
  for (auto x : keep) {
    if (x >= m.size()) throw InvalidArgument(fmt::format("index {} out of range", x));
    m[x] = map_[x];
  }
  return MeasureApproximation(source_, target_, std::move(m));
}

MeasureApproximation nearest_point_map(SpacePtr source, SpacePtr target) {
  if (source->chart() == Chart::None || source->chart() != target->chart()) {
    throw InvalidArgument("nearest_point_map needs both spaces to carry the same chart");
  }
  const auto chart = source->chart();
  const double period = target->period();
  if (chart == Chart::Periodic && std::abs(source->period() - period) > 1e-12 * period) {
    throw InvalidArgument("periodic charts with different periods");
  }
  if (source->coords().cols() != target->coords().cols()) {
    throw InvalidArgument("coordinate dimensions differ");
  }
  const double tie = 1e-12 * std::max(1.0, target->diameter());
  std::vector<std::optional<std::size_t>> m(source->size());
  for (std::size_t x = 0; x < source->size(); ++x) {
    const Eigen::VectorXd a = source->coords().row(static_cast<Eigen::Index>(x)).transpose();
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t y = 0; y < target->size(); ++y) {
      const Eigen::VectorXd b = target->coords().row(static_cast<Eigen::Index>(y)).transpose();
      const double d = FiniteMetricMeasureSpace::chart_distance(chart, period, a, b);
      if (d < best - tie) {
        best = d;
        arg = y;
      } else if (chart == Chart::Periodic && std::abs(d - best) <= tie) {
        // Signed offset of b from a in (-period/2, period/2].
        double off = std::fmod(b(0) - a(0), period);
        if (off <= -period / 2) off += period;
        if (off > period / 2) off -= period;
        if (off < 0) arg = y;
      }
    }
    m[x] = arg;
  }
  return MeasureApproximation(std::move(source), std::move(target), std::move(m));
}

}  // namespace mmvlab
