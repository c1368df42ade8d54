#include "mmvlab/covering.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

namespace {

std::vector<std::size_t> shuffled(std::vector<std::size_t> v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[static_cast<std::size_t>(rng() % i)]);
  }
  return v;
}

void greedy_extend(const FiniteMetricMeasureSpace& x, double r, std::span<const std::size_t> order,
                   std::vector<std::size_t>& net) {
  for (auto p : order) {
    const bool separated = std::all_of(net.begin(), net.end(),
                                       [&](std::size_t q) { return x.distance(p, q) >= r; });
    if (separated) net.push_back(p);
  }
}

std::size_t order_of(const FiniteMetricMeasureSpace& x, std::span<const std::size_t> net,
                     double radius) {
  std::size_t best = 0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    std::size_t count = 0;
    for (auto s : net)
      if (x.distance(s, q) < radius) ++count;
    best = std::max(best, count);
  }
  return best;
}

// Maximum independent set of the conflict graph restricted to `mask`.
int max_independent(std::uint32_t mask, const std::vector<std::uint32_t>& conflict) {
  if (mask == 0) return 0;
  const int v = std::countr_zero(mask);
  const std::uint32_t rest = mask & ~(1u << v);
  const int without = max_independent(rest, conflict);
  const std::uint32_t compatible = rest & ~conflict[static_cast<std::size_t>(v)];
  if (1 + std::popcount(compatible) <= without) return without;
  return std::max(without, 1 + max_independent(compatible, conflict));
}

}  // namespace

std::vector<std::size_t> maximal_r_discrete_net(const FiniteMetricMeasureSpace& x, double r,
                                                std::optional<std::uint64_t> seed) {
  if (!(r > 0.0)) throw InvalidArgument("net radius must be positive");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (seed) {
    std::mt19937_64 rng(*seed);
    order = shuffled(std::move(order), rng);
  }
  std::vector<std::size_t> net;
  greedy_extend(x, r, order, net);
  return net;
}

std::size_t covering_order(const FiniteMetricMeasureSpace& x, double c, double r,
                           const CoveringOrderOptions& options) {
  if (!(c >= 1.0)) throw InvalidArgument("covering order needs c >= 1");
  if (!(r > 0.0)) throw InvalidArgument("covering order needs r > 0");
  const double radius = c * r;
  const auto n = x.size();

  if (options.mode == CoveringOrderOptions::Mode::Exhaustive) {
    if (n > options.exhaustive_cap || n > 31) {
      throw InvalidArgument(fmt::format(
          "exhaustive covering order limited to n <= {} points, got {}", options.exhaustive_cap, n));
    }
    std::vector<std::uint32_t> conflict(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && x.distance(i, j) < r) conflict[i] |= 1u << j;
    int best = 0;
    for (std::size_t z = 0; z < n; ++z) {
      std::uint32_t mask = 0;
      for (std::size_t s = 0; s < n; ++s)
        if (x.distance(z, s) < radius) mask |= 1u << s;
      best = std::max(best, max_independent(mask, conflict));
    }
    return static_cast<std::size_t>(best);
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::size_t best = 0;
  for (std::size_t trial = 0; trial < std::max<std::size_t>(options.budget, 1); ++trial) {
    // Pack the ball around a random centre first, then complete to a maximal net.
    const auto z = static_cast<std::size_t>(rng() % n);
    const auto inner = shuffled(x.ball(z, radius), rng);
    std::vector<std::size_t> net;
    greedy_extend(x, r, inner, net);
    greedy_extend(x, r, shuffled(all, rng), net);
    best = std::max(best, order_of(x, net, radius));
  }
  return best;
}

std::vector<std::size_t> project_onto_subset(const FiniteMetricMeasureSpace& z,
                                             std::span<const std::size_t> subset) {
  if (subset.empty()) throw InvalidArgument("projection target subset is empty");
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  for (auto s : sorted)
    if (s >= z.size()) throw InvalidArgument(fmt::format("index {} out of range", s));
  std::vector<std::size_t> out(z.size());
  for (std::size_t p = 0; p < z.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (auto s : sorted) {
      if (z.distance(p, s) < best) {
        best = z.distance(p, s);
        out[p] = s;
      }
    }
  }
  return out;
}

Eigen::MatrixXd kuratowski_embed(const FiniteMetricMeasureSpace& x, std::size_t anchor) {
  if (anchor >= x.size()) throw InvalidArgument("anchor index out of range");
  return x.dist().rowwise() - x.dist().row(static_cast<Eigen::Index>(anchor));
}

}  // namespace mmvlab
