#pragma once

#include <cstddef>
#include <vector>

#include "mmvlab/space.hpp"
#include "mmvlab/tree.hpp"

namespace mmvlab {

// All samplers return equally weighted points of total mass 1 together with
// model coordinates, so that refinements can be mapped onto each other.

/// n equally spaced points on a circle, arc-length metric.
FiniteMetricMeasureSpace sample_circle(std::size_t n, double circumference);

/// n equally spaced points on [0, length], endpoints included (n = 1 gives {0}).
FiniteMetricMeasureSpace sample_interval(std::size_t n, double length);

/// Tensor grid with `points[k]` samples on [0, sides[k]] (endpoints included), l2 metric.
FiniteMetricMeasureSpace sample_cube(const std::vector<std::size_t>& points,
                                     const std::vector<double>& sides);

/// The box [0,1] x [0,1/2] x ... x [0,1/2^(dim-1)] with `per_unit` grid
/// intervals per unit length along every axis (at least one per axis).
FiniteMetricMeasureSpace sample_qcube(std::size_t dim, std::size_t per_unit);

/// Vertices of the tree plus `interior_per_edge` equally spaced interior
/// points on every edge; tree path metric. Coordinates are not attached.
FiniteMetricMeasureSpace sample_tree(const std::vector<TreeEdge>& edges,
                                     std::size_t interior_per_edge);

/// The tree points matching sample_tree's ordering.
std::vector<TreePoint> tree_sample_points(const MetricTree& tree, std::size_t interior_per_edge);

}  // namespace mmvlab
