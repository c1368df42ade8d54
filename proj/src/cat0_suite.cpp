#include "mmvlab/cat0_suite.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "mmvlab/energy.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/functional.hpp"
#include "mmvlab/geometry.hpp"
#include "mmvlab/random.hpp"
#include "mmvlab/samplers.hpp"

namespace mmvlab {

TargetPoint random_target_point(const TargetSpace& y, std::mt19937_64& rng, double scale) {
  switch (y.kind()) {
    case TargetSpace::Kind::Euclidean: {
      Eigen::VectorXd v(static_cast<Eigen::Index>(y.dim()));
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = scale * (2.0 * uniform01(rng) - 1.0);
      return TargetPoint(std::move(v));
    }
    case TargetSpace::Kind::Tree: {
      const auto& t = y.metric_tree();
      const auto e = static_cast<std::size_t>(rng() % t.edge_count());
      return TargetPoint(TreePoint{e, uniform01(rng) * t.edge(e).length});
    }
    case TargetSpace::Kind::FiniteMetric:
      return TargetPoint(static_cast<std::size_t>(rng() % y.finite_space().size()));
    case TargetSpace::Kind::Product: {
      std::vector<TargetPoint> parts;
      for (const auto& f : y.factors()) parts.push_back(random_target_point(*f, rng, scale));
      return TargetPoint(std::move(parts));
    }
  }
  throw InvalidArgument("unknown target kind");
}

Cat0SuiteReport cat0_property_suite(const TargetPtr& y, const Cat0SuiteOptions& options) {
  if (!y->has_geodesics()) {
    throw InvalidArgument(fmt::format("target {} has no geodesics to test", y->describe()));
  }
  if (options.lambdas.empty()) throw InvalidArgument("cat0 suite needs at least one lambda");
  std::mt19937_64 rng(options.seed);
  const double inf = std::numeric_limits<double>::infinity();
  Cat0SuiteReport rep;
  rep.target = y->describe();
  rep.comparison = rep.cn = rep.projection = rep.nonexpansive = rep.step_bound = inf;

  for (std::size_t k = 0; k < options.triangles; ++k) {
    const auto a = random_target_point(*y, rng, options.scale);
    const auto b = random_target_point(*y, rng, options.scale);
    const auto c = random_target_point(*y, rng, options.scale);
    const double s = uniform01(rng);
    const double t = uniform01(rng);
    rep.comparison = std::min(rep.comparison, comparison_slack(*y, a, b, c, s, t));
    rep.cn = std::min(rep.cn, comparison_slack(*y, a, b, c, t));
    ++rep.triangles;
  }

  const auto domain = share(sample_circle(options.domain_points, 2.0 * std::numbers::pi));
  EnergyConfig cfg;
  cfg.rho = 1.5 * 2.0 * std::numbers::pi / static_cast<double>(options.domain_points);
  const auto e = ConvexFunctional::from_energy(EnergyForm(domain, cfg), y);
  auto random_map = [&] {
    MappedFunction u{domain, y, {}};
    for (std::size_t i = 0; i < domain->size(); ++i) u.values.push_back(random_target_point(*y, rng, options.scale));
    return u;
  };
  for (std::size_t k = 0; k < options.pairs; ++k) {
    const auto a = random_target_point(*y, rng, options.scale);
    const auto b = random_target_point(*y, rng, options.scale);
    const auto x = random_target_point(*y, rng, options.scale);
    const auto z = random_target_point(*y, rng, options.scale);
    const auto px = project_to_geodesic(*y, x, a, b).point;
    const auto pz = project_to_geodesic(*y, z, a, b).point;
    rep.projection = std::min(rep.projection, y->distance(x, z) - y->distance(px, pz));

    const double lambda = options.lambdas[k % options.lambdas.size()];
    const auto u = random_map();
    const auto v = random_map();
    const auto ju = resolvent(e, u, lambda);
    const auto jv = resolvent(e, v, lambda);
    rep.nonexpansive = std::min(rep.nonexpansive, lp_distance(u, v, 2.0) - lp_distance(ju, jv, 2.0));
    const double step = lp_distance(ju, u, 2.0);
    rep.step_bound = std::min(rep.step_bound, lambda * (e(u) - e.lower_bound()) - step * step);
    ++rep.pairs;
  }
  return rep;
}

}  // namespace mmvlab
