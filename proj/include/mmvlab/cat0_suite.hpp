#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mmvlab/target.hpp"

namespace mmvlab {

/// Coordinates uniform in [-scale, scale] on Euclidean factors, a uniform
/// edge and offset on trees, an index on finite targets.
TargetPoint random_target_point(const TargetSpace& y, std::mt19937_64& rng, double scale = 2.0);

struct Cat0SuiteOptions {
  std::size_t triangles = 1000;
  std::size_t pairs = 500;
  std::uint64_t seed = 0;
  std::vector<double> lambdas{0.1, 1.0, 10.0};
  std::size_t domain_points = 6;  // circle domain of the resolvent checks
  double scale = 2.0;
};

/// Minimum slacks over the fuzzed cases; each is >= 0 on a CAT(0) target.
struct Cat0SuiteReport {
  std::string target;
  std::size_t triangles = 0;
  std::size_t pairs = 0;
  double comparison = 0.0;    // |p~ q~| - d(p, q) for points on two sides
  double cn = 0.0;            // comparison_slack in the squared form
  double projection = 0.0;    // d(x, y) - d(pi x, pi y) onto a random geodesic
  double nonexpansive = 0.0;  // d(u, v) - d(J u, J v) for maps into the target
  double step_bound = 0.0;    // lambda E(u) - d(J u, u)^2
};

/// Fuzzes the comparison inequality on triangles, the 1-Lipschitz geodesic
/// projection and the resolvent inequalities on a small circle energy.
/// Throws InvalidArgument for targets without geodesics.
Cat0SuiteReport cat0_property_suite(const TargetPtr& y, const Cat0SuiteOptions& options = {});

}  // namespace mmvlab
