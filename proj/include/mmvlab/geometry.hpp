#pragma once

#include <cstddef>
#include <span>

#include "mmvlab/target.hpp"

namespace mmvlab {

/// The point at fraction t of the geodesic from x to y (t clamped to [0,1]).
/// Throws InvalidArgument on targets without geodesics.
TargetPoint geodesic(const TargetSpace& y, const TargetPoint& a, const TargetPoint& b, double t);

struct SegmentProjection {
  TargetPoint point;
  double t = 0.0;  // geodesic parameter of the projection
};

/// Nearest point to x on the geodesic segment [a, b]. Exact on Euclidean,
/// tree and flat products of those (the squared distance along the segment
/// is piecewise quadratic in t); golden-section search on nested products.
SegmentProjection project_to_geodesic(const TargetSpace& y, const TargetPoint& x,
                                      const TargetPoint& a, const TargetPoint& b);

/// sum_j w_j d(m, p_j)^2
double frechet_objective(const TargetSpace& y, const TargetPoint& m,
                         std::span<const TargetPoint> points, std::span<const double> weights);

/// Exact weighted Fréchet mean (barycenter). Euclidean: weighted average.
/// Tree: on each edge the objective is a quadratic in the offset, so the
/// edge-wise clamped minimizers are compared. Product: per factor. Finite
/// metric: best target point (lowest index on ties).
TargetPoint frechet_mean(const TargetSpace& y, std::span<const TargetPoint> points,
                         std::span<const double> weights);

/// Inductive mean: m <- geodesic(m, p_k, w_k / W) cycling through the points
/// in order, W the running total weight. Approximates the Fréchet mean; the
/// error decays with the number of passes.
TargetPoint inductive_mean(const TargetSpace& y, std::span<const TargetPoint> points,
                           std::span<const double> weights, std::size_t passes = 200);

/// Comparison slack for a point on the side [b, c]: with p = geodesic(b, c, t),
/// returns |a~ p~|^2 - d(a, p)^2 where |a~ p~|^2 is the Euclidean comparison
/// value (1-t) d(a,b)^2 + t d(a,c)^2 - t(1-t) d(b,c)^2. Nonnegative on CAT(0).
double comparison_slack(const TargetSpace& y, const TargetPoint& a, const TargetPoint& b,
                        const TargetPoint& c, double t);

/// Slack |p~ q~| - d(p, q) for p = geodesic(a, b, s), q = geodesic(a, c, t)
/// against the planar comparison triangle built by the law of cosines.
double comparison_slack(const TargetSpace& y, const TargetPoint& a, const TargetPoint& b,
                        const TargetPoint& c, double s, double t);

}  // namespace mmvlab
