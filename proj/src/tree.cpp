#include "mmvlab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

MetricTree::MetricTree(std::vector<TreeEdge> edges) : edges_(std::move(edges)) {
  if (edges_.empty()) throw InvalidArgument("a metric tree needs at least one edge");
  for (const auto& e : edges_) {
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw InvalidArgument(fmt::format("edge ({}, {}) has nonpositive length {}", e.from, e.to,
                                        e.length));
    }
    if (e.from == e.to) throw InvalidArgument(fmt::format("self-loop at vertex {}", e.from));
    vertex_count_ = std::max({vertex_count_, e.from + 1, e.to + 1});
  }
  std::vector<std::size_t> parent(vertex_count_);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& e : edges_) {
    const auto ra = find_root(parent, e.from);
    const auto rb = find_root(parent, e.to);
    if (ra == rb) {
      throw InvalidArgument(fmt::format("edge list has a cycle through edge ({}, {})", e.from, e.to));
    }
    parent[ra] = rb;
  }
  if (edges_.size() + 1 != vertex_count_) {
    throw InvalidArgument("edge list is not connected");
  }

  incident_.assign(vertex_count_, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    incident_[edges_[e].from].push_back(e);
    incident_[edges_[e].to].push_back(e);
  }

  vdist_ = Eigen::MatrixXd::Zero(vertex_count_, vertex_count_);
  next_edge_.assign(vertex_count_, std::vector<std::size_t>(vertex_count_, 0));
  // Depth-first sweep from every vertex; record the first edge taken toward each target.
  for (std::size_t src = 0; src < vertex_count_; ++src) {
    struct Frame {
      std::size_t vertex;
      std::size_t via_edge;
      std::size_t first_edge;
    };
    std::vector<Frame> stack{{src, edges_.size(), 0}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      for (auto e : incident_[f.vertex]) {
        if (e == f.via_edge) continue;
        const auto& edge = edges_[e];
        const auto next = edge.from == f.vertex ? edge.to : edge.from;
        vdist_(src, next) = vdist_(src, f.vertex) + edge.length;
        const auto first = f.vertex == src ? e : f.first_edge;
        next_edge_[src][next] = first;
        stack.push_back({next, e, first});
      }
    }
  }
}

TreePoint MetricTree::vertex_point(std::size_t v) const {
  if (v >= vertex_count_) throw InvalidArgument(fmt::format("vertex {} out of range", v));
  const auto e = incident_[v].front();
  return {e, edges_[e].from == v ? 0.0 : edges_[e].length};
}

void MetricTree::check(const TreePoint& p) const {
  if (p.edge >= edges_.size()) throw InvalidArgument(fmt::format("edge {} out of range", p.edge));
  const double len = edges_[p.edge].length;
  if (!(p.offset >= -1e-12 * len && p.offset <= len * (1.0 + 1e-12))) {
    throw InvalidArgument(fmt::format("offset {} outside edge {} of length {}", p.offset, p.edge,
                                      len));
  }
}

double MetricTree::distance_to_vertex(std::size_t v, const TreePoint& p) const {
  const auto& e = edges_[p.edge];
  return std::min(vdist_(v, e.from) + p.offset, vdist_(v, e.to) + e.length - p.offset);
}

double MetricTree::distance(const TreePoint& p, const TreePoint& q) const {
  if (p.edge == q.edge) return std::abs(p.offset - q.offset);
  const auto& ep = edges_[p.edge];
  return std::min(distance_to_vertex(ep.from, q) + p.offset,
                  distance_to_vertex(ep.to, q) + ep.length - p.offset);
}

TreePoint MetricTree::along_vertex_path(std::size_t a, std::size_t b, double s) const {
  std::size_t cur = a;
  while (cur != b) {
    const auto e = next_edge_[cur][b];
    const auto& edge = edges_[e];
    if (s <= edge.length) {
      return {e, edge.from == cur ? s : edge.length - s};
    }
    s -= edge.length;
    cur = edge.from == cur ? edge.to : edge.from;
  }
  return vertex_point(b);
}

TreePoint MetricTree::geodesic(const TreePoint& p, const TreePoint& q, double t) const {
  if (p.edge == q.edge) return {p.edge, p.offset + t * (q.offset - p.offset)};
  const auto& ep = edges_[p.edge];
  const auto& eq = edges_[q.edge];
  const std::size_t pa[2] = {ep.from, ep.to};
  const double pd[2] = {p.offset, ep.length - p.offset};
  const std::size_t qb[2] = {eq.from, eq.to};
  const double qd[2] = {q.offset, eq.length - q.offset};
  double best = std::numeric_limits<double>::infinity();
  int bi = 0;
  int bj = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double len = pd[i] + vdist_(pa[i], qb[j]) + qd[j];
      if (len < best) {
        best = len;
        bi = i;
        bj = j;
      }
    }
  }
  const double s = std::clamp(t, 0.0, 1.0) * best;
  if (s <= pd[bi]) {
    return {p.edge, bi == 0 ? p.offset - s : p.offset + s};
  }
  const double mid = vdist_(pa[bi], qb[bj]);
  if (s <= pd[bi] + mid) return along_vertex_path(pa[bi], qb[bj], s - pd[bi]);
  const double rest = std::min(s - pd[bi] - mid, qd[bj]);
  return {q.edge, bj == 0 ? rest : eq.length - rest};
}

double MetricTree::total_length() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

}  // namespace mmvlab
