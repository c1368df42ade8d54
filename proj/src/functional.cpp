#include "mmvlab/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mmvlab/error.hpp"
#include "mmvlab/geometry.hpp"

namespace mmvlab {

ConvexFunctional::ConvexFunctional(SpacePtr domain, TargetPtr target, double p,
                                   std::vector<PairTerm> pairs, std::vector<AnchorTerm> anchors,
                                   double lower_bound)
    : domain_(std::move(domain)),
      target_(std::move(target)),
      p_(p),
      pairs_(std::move(pairs)),
      anchors_(std::move(anchors)),
      lower_bound_(lower_bound) {
  if (!domain_ || !target_) throw InvalidArgument("functional needs a domain and a target");
  if (!(p_ >= 1.0)) throw InvalidArgument("functional exponent must be >= 1");
  const auto n = domain_->size();
  for (const auto& t : pairs_) {
    if (t.a >= n || t.b >= n) throw InvalidArgument("pair term index out of range");
    if (!(t.coeff >= 0.0)) throw InvalidArgument("pair coefficients must be nonnegative");
  }
  for (const auto& t : anchors_) {
    if (t.a >= n) throw InvalidArgument("anchor term index out of range");
    if (!(t.coeff >= 0.0)) throw InvalidArgument("anchor coefficients must be nonnegative");
    target_->check(t.point);
  }
}

ConvexFunctional ConvexFunctional::zero(SpacePtr domain, TargetPtr target) {
  return ConvexFunctional(std::move(domain), std::move(target), 2.0, {});
}

ConvexFunctional ConvexFunctional::from_energy(const EnergyForm& form, TargetPtr target) {
  const auto& rows = form.kernel();
  std::vector<PairTerm> pairs;
  // 1/2 sum over ordered pairs, merged onto unordered pairs a < b.
  for (std::size_t x = 0; x < rows.size(); ++x) {
    for (const auto& k : rows[x]) {
      if (k.y > x) {
        double back = 0.0;
        for (const auto& r : rows[k.y])
          if (r.y == x) back = r.k;
        pairs.push_back({x, k.y, 0.5 * (k.k + back)});
      } else {
        bool has_back = false;
        for (const auto& r : rows[k.y])
          if (r.y == x) has_back = true;
        if (!has_back) pairs.push_back({k.y, x, 0.5 * k.k});
      }
    }
  }
  return ConvexFunctional(form.domain(), std::move(target), form.config().p, std::move(pairs));
}

double ConvexFunctional::operator()(const MappedFunction& v) const {
  if (v.values.size() != domain_->size()) throw InvalidArgument("map size differs from the domain");
  double s = 0.0;
  for (const auto& t : pairs_) s += t.coeff * std::pow(target_->distance(v.values[t.a], v.values[t.b]), p_);
  for (const auto& t : anchors_) s += t.coeff * std::pow(target_->distance(v.values[t.a], t.point), p_);
  return s;
}

namespace {

struct Incident {
  std::size_t y;
  double coeff;
};

double l2_norm(const MappedFunction& u) {
  double s = 0.0;
  for (std::size_t x = 0; x < u.values.size(); ++x) {
    const double d = u.target->distance(u.values[x], u.target->basepoint());
    s += u.domain->weight(x) * d * d;
  }
  return std::sqrt(s);
}

// Minimizer on [lo, hi] of a convex function given by its right derivative:
// the leftmost s with slope(s) >= 0, found by bisection down to adjacent doubles.
template <class F>
double slope_min(F slope, double lo, double hi) {
  if (slope(lo) >= 0.0) return lo;
  if (slope(hi) < 0.0) return hi;
  for (int it = 0; it < 2100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (slope(mid) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

// Right derivative of s -> d(P(s), q) for P(s) = s on the real line or the
// point at offset s on tree edge `ed`.
double distance_slope(const TargetSpace& y, std::size_t ed, double s, const TargetPoint& q) {
  if (y.kind() == TargetSpace::Kind::Euclidean) return s >= q.coords()(0) ? 1.0 : -1.0;
  const auto& tree = y.metric_tree();
  const auto& qp = q.tree_point();
  if (qp.edge == ed) return s >= qp.offset ? 1.0 : -1.0;
  const auto& edge = tree.edge(ed);
  return tree.distance_to_vertex(edge.to, qp) < tree.distance_to_vertex(edge.from, qp) ? -1.0 : 1.0;
}

}  // namespace

MappedFunction resolvent(const ConvexFunctional& e, const MappedFunction& u, double lambda,
                         const ResolventOptions& options, ResolventStats* stats) {
  if (!(lambda > 0.0)) throw InvalidArgument("resolvent needs lambda > 0");
  const auto& m = *e.domain();
  const auto n = m.size();
  if (u.values.size() != n) throw InvalidArgument("map size differs from the functional's domain");
  const auto& tgt = *e.target();
  const double p = e.p();
  const bool euclid = tgt.kind() == TargetSpace::Kind::Euclidean;
  if (p != 2.0 && !(tgt.kind() == TargetSpace::Kind::Tree || (euclid && tgt.dim() == 1))) {
    throw InvalidArgument("p != 2 resolvents are supported on trees and the real line only");
  }
  if (p == 2.0 && !tgt.has_geodesics()) {
    throw InvalidArgument(fmt::format("resolvent needs a geodesic target, got {}", tgt.describe()));
  }

  std::vector<std::vector<Incident>> adj(n);
  for (const auto& t : e.pairs()) {
    if (t.a == t.b || t.coeff == 0.0) continue;
    adj[t.a].push_back({t.b, t.coeff});
    adj[t.b].push_back({t.a, t.coeff});
  }
  std::vector<std::vector<const ConvexFunctional::AnchorTerm*>> anchors(n);
  for (const auto& t : e.anchors()) anchors[t.a].push_back(&t);

  MappedFunction v = options.initial ? *options.initial : u;
  if (v.values.size() != n) throw InvalidArgument("warm start has the wrong size");
  v.target = u.target;
  const double scale = 1.0 + l2_norm(u);
  double residual = std::numeric_limits<double>::infinity();
  std::size_t sweep = 0;

  if (euclid && p == 2.0) {
    const EuclideanResolvent prepared(e);
    Eigen::MatrixXd cur = EuclideanResolvent::to_matrix(v);
    ResolventOptions o = options;
    o.initial = nullptr;
    const auto st = prepared.apply(EuclideanResolvent::to_matrix(u), lambda, cur, o);
    EuclideanResolvent::assign(v, cur);
    if (stats) *stats = st;
    return v;
  } else {
    std::vector<TargetPoint> pts;
    std::vector<double> wts;
    while (sweep < options.max_sweeps) {
      ++sweep;
      double moved = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        const double wx = m.weight(x);
        TargetPoint next;
        if (p == 2.0) {
          pts.assign(1, u.values[x]);
          wts.assign(1, wx);
          for (const auto& a : adj[x]) {
            pts.push_back(v.values[a.y]);
            wts.push_back(lambda * a.coeff);
          }
          for (const auto* a : anchors[x]) {
            pts.push_back(a->point);
            wts.push_back(lambda * a->coeff);
          }
          next = frechet_mean(tgt, pts, wts);
        } else {
          auto local = [&](const TargetPoint& q) {
            const double du = tgt.distance(q, u.values[x]);
            double s = wx * du * du;
            for (const auto& a : adj[x]) s += lambda * a.coeff * std::pow(tgt.distance(q, v.values[a.y]), p);
            for (const auto* a : anchors[x]) s += lambda * a->coeff * std::pow(tgt.distance(q, a->point), p);
            return s;
          };
          auto term = [&](std::size_t ed, double t, const TargetPoint& at, const TargetPoint& q) {
            return std::pow(tgt.distance(at, q), p - 1.0) * distance_slope(tgt, ed, t, q);
          };
          auto slope = [&](std::size_t ed, double t, const TargetPoint& at) {
            double g = 2.0 * wx * tgt.distance(at, u.values[x]) * distance_slope(tgt, ed, t, u.values[x]);
            for (const auto& a : adj[x]) g += lambda * a.coeff * p * term(ed, t, at, v.values[a.y]);
            for (const auto* a : anchors[x]) g += lambda * a->coeff * p * term(ed, t, at, a->point);
            return g;
          };
          if (euclid) {
            double lo = u.values[x].coords()(0);
            double hi = lo;
            for (const auto& a : adj[x]) {
              lo = std::min(lo, v.values[a.y].coords()(0));
              hi = std::max(hi, v.values[a.y].coords()(0));
            }
            for (const auto* a : anchors[x]) {
              lo = std::min(lo, a->point.coords()(0));
              hi = std::max(hi, a->point.coords()(0));
            }
            next = TargetPoint::real(
                slope_min([&](double t) { return slope(0, t, TargetPoint::real(t)); }, lo, hi));
          } else {
            const auto& tree = tgt.metric_tree();
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t ed = 0; ed < tree.edge_count(); ++ed) {
              const double len = tree.edge(ed).length;
              const double t = slope_min(
                  [&](double s) { return slope(ed, s, TargetPoint(TreePoint{ed, s})); }, 0.0, len);
              TargetPoint cand(TreePoint{ed, t});
              const double f = local(cand);
              if (f < best) {
                best = f;
                next = cand;
              }
            }
          }
        }
        const double d = tgt.distance(next, v.values[x]);
        moved += wx * d * d;
        v.values[x] = std::move(next);
      }
      residual = std::sqrt(moved);
      if (residual <= options.tol * scale) break;
    }
  }
  if (stats) {
    stats->sweeps = sweep;
    stats->residual = residual;
  }
  if (!(residual <= options.tol * scale)) {
    throw SolverError(fmt::format("resolvent did not converge in {} sweeps (lambda = {}, residual = {})",
                                  sweep, lambda, residual),
                      residual);
  }
  return v;
}

EuclideanResolvent::EuclideanResolvent(const ConvexFunctional& e) {
  const auto& tgt = *e.target();
  if (tgt.kind() != TargetSpace::Kind::Euclidean || e.p() != 2.0) {
    throw InvalidArgument("the prepared resolvent needs a Euclidean target and p = 2");
  }
  const auto n = e.domain()->size();
  const auto dim = static_cast<Eigen::Index>(tgt.dim());
  weight_ = e.domain()->weight();
  base_ = tgt.basepoint().coords();
  adj_.resize(n);
  for (const auto& t : e.pairs()) {
    if (t.a == t.b || t.coeff == 0.0) continue;
    adj_[t.a].push_back({static_cast<Eigen::Index>(t.b), t.coeff});
    adj_[t.b].push_back({static_cast<Eigen::Index>(t.a), t.coeff});
  }
  anchor_coeff_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  anchor_sum_ = Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(n));
  for (const auto& t : e.anchors()) {
    anchor_coeff_(static_cast<Eigen::Index>(t.a)) += t.coeff;
    anchor_sum_.col(static_cast<Eigen::Index>(t.a)) += t.coeff * t.point.coords();
  }
}

ResolventStats EuclideanResolvent::apply(const Eigen::MatrixXd& u, double lambda, Eigen::MatrixXd& v,
                                         const ResolventOptions& options) const {
  if (!(lambda > 0.0)) throw InvalidArgument("resolvent needs lambda > 0");
  if (u.cols() != weight_.size() || v.cols() != weight_.size() || u.rows() != base_.size() || v.rows() != base_.size()) {
    throw InvalidArgument("coordinate matrix has the wrong shape");
  }
  const double scale = 1.0 + std::sqrt(((u.colwise() - base_).colwise().squaredNorm().transpose().array() * weight_.array()).sum());
  Eigen::VectorXd acc(u.rows());
  ResolventStats st;
  st.residual = std::numeric_limits<double>::infinity();
  while (st.sweeps < options.max_sweeps) {
    ++st.sweeps;
    double moved = 0.0;
    for (Eigen::Index x = 0; x < u.cols(); ++x) {
      const double wx = weight_(x);
      acc = wx * u.col(x) + lambda * anchor_sum_.col(x);
      double total = wx + lambda * anchor_coeff_(x);
      for (const auto& a : adj_[static_cast<std::size_t>(x)]) {
        acc += lambda * a.coeff * v.col(a.y);
        total += lambda * a.coeff;
      }
      acc /= total;
      moved += wx * (acc - v.col(x)).squaredNorm();
      v.col(x) = acc;
    }
    st.residual = std::sqrt(moved);
    if (st.residual <= options.tol * scale) return st;
  }
  throw SolverError(fmt::format("resolvent did not converge in {} sweeps (lambda = {}, residual = {})", st.sweeps,
                                lambda, st.residual),
                    st.residual);
}

Eigen::MatrixXd EuclideanResolvent::to_matrix(const MappedFunction& u) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(u.target->dim()), static_cast<Eigen::Index>(u.values.size()));
  for (std::size_t x = 0; x < u.values.size(); ++x) m.col(static_cast<Eigen::Index>(x)) = u.values[x].coords();
  return m;
}

void EuclideanResolvent::assign(MappedFunction& u, const Eigen::MatrixXd& m) {
  u.values.resize(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index x = 0; x < m.cols(); ++x) u.values[static_cast<std::size_t>(x)] = TargetPoint(Eigen::VectorXd(m.col(x)));
}

double moreau_yosida(const ConvexFunctional& e, const MappedFunction& u, double lambda,
                     const ResolventOptions& options) {
  const auto j = resolvent(e, u, lambda, options);
  const double d = lp_distance(u, j, 2.0);
  return lambda * e(j) + d * d;
}

}  // namespace mmvlab
