#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mmvlab {

struct TreeEdge {
  std::size_t from;
  std::size_t to;
  double length;
};

/// A point of a metric tree: `offset` is measured from the edge's `from` vertex.
struct TreePoint {
  std::size_t edge = 0;
  double offset = 0.0;
};

/// A finite metric tree (an R-tree with finitely many edges). Path metric,
/// geodesics and the vertex tables needed to walk them.
class MetricTree {
 public:
  /// Throws InvalidArgument for nonpositive lengths, bad vertex ids,
  /// cycles, or a disconnected edge list.
  explicit MetricTree(std::vector<TreeEdge> edges);

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<TreeEdge>& edges() const { return edges_; }
  const TreeEdge& edge(std::size_t e) const { return edges_[e]; }
  double vertex_distance(std::size_t a, std::size_t b) const { return vdist_(a, b); }

  /// Some point representing vertex v.
  TreePoint vertex_point(std::size_t v) const;
  /// Distance from vertex v to point p.
  double distance_to_vertex(std::size_t v, const TreePoint& p) const;
  double distance(const TreePoint& p, const TreePoint& q) const;
  /// The point at fraction t of the way from p to q.
  TreePoint geodesic(const TreePoint& p, const TreePoint& q, double t) const;
  /// Throws InvalidArgument when the point is off its edge.
  void check(const TreePoint& p) const;
  double total_length() const;

 private:
  // Point at arclength s along the vertex path a -> b.
  TreePoint along_vertex_path(std::size_t a, std::size_t b, double s) const;

  std::vector<TreeEdge> edges_;
  std::size_t vertex_count_ = 0;
  Eigen::MatrixXd vdist_;
  // next_edge_[a][b]: edge leaving a on the path to b (unused when a == b)
  std::vector<std::vector<std::size_t>> next_edge_;
  std::vector<std::vector<std::size_t>> incident_;
};

}  // namespace mmvlab
