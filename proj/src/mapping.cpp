#include "mmvlab/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mmvlab/covering.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/geometry.hpp"

namespace mmvlab {

MappedFunction MappedFunction::constant(SpacePtr domain, TargetPtr target, const TargetPoint& y) {
  target->check(y);
  MappedFunction u{std::move(domain), std::move(target), {}};
  u.values.assign(u.domain->size(), y);
  return u;
}

MappedFunction MappedFunction::real(SpacePtr domain, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != domain->size()) {
    throw InvalidArgument("value vector length differs from the domain size");
  }
  MappedFunction u{std::move(domain), TargetSpace::real(), {}};
  u.values.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) u.values.push_back(TargetPoint::real(values(i)));
  return u;
}

Eigen::VectorXd MappedFunction::real_values() const {
  if (target->kind() != TargetSpace::Kind::Euclidean || target->dim() != 1) {
    throw InvalidArgument("expected a real-valued map");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i].coords()(0);
  return v;
}

void MappedFunction::check() const {
  if (!domain || !target) throw InvalidArgument("map without domain or target");
  if (values.size() != domain->size()) {
    throw InvalidArgument(fmt::format("map has {} values on a domain of {} points", values.size(),
                                      domain->size()));
  }
  for (const auto& v : values) target->check(v);
}

namespace {

bool same_target(const TargetSpace& a, const TargetSpace& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TargetSpace::Kind::Euclidean:
      return a.dim() == b.dim();
    case TargetSpace::Kind::Tree: {
      if (a.tree_ptr() == b.tree_ptr()) return true;
      const auto& ea = a.metric_tree().edges();
      const auto& eb = b.metric_tree().edges();
      return std::equal(ea.begin(), ea.end(), eb.begin(), eb.end(), [](const TreeEdge& x, const TreeEdge& y) {
        return x.from == y.from && x.to == y.to && x.length == y.length;
      });
    }
    case TargetSpace::Kind::FiniteMetric:
      return a.finite_ptr() == b.finite_ptr() || a.finite_space().dist() == b.finite_space().dist();
    case TargetSpace::Kind::Product:
      if (a.factors().size() != b.factors().size()) return false;
      for (std::size_t i = 0; i < a.factors().size(); ++i)
        if (!same_target(*a.factors()[i], *b.factors()[i])) return false;
      return true;
  }
  return false;
}

}  // namespace

double lp_distance(const MappedFunction& u, const MappedFunction& v, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p distance needs p >= 1");
  if (u.domain != v.domain && (u.domain->size() != v.domain->size() ||
                                u.domain->dist() != v.domain->dist())) {
    throw InvalidArgument("maps live on different domains");
  }
  if (!same_target(*u.target, *v.target)) throw InvalidArgument("maps have different targets");
  double s = 0.0;
  for (std::size_t x = 0; x < u.values.size(); ++x) {
    const double d = u.target->distance(u.values[x], v.values[x]);
    s += u.domain->weight(x) * std::pow(d, p);
  }
  return std::pow(s, 1.0 / p);
}

MappedFunction pushforward(const MappedFunction& u, const MeasureApproximation& phi,
                           const TargetPoint* fill) {
  if (phi.target()->size() != u.domain->size()) {
    throw InvalidArgument("measure approximation does not land in the map's domain");
  }
  const TargetPoint& o = fill ? *fill : u.target->basepoint();
  MappedFunction out{phi.source(), u.target, {}};
  out.values.reserve(phi.source()->size());
  for (std::size_t x = 0; x < phi.source()->size(); ++x) {
    const auto y = phi(x);
    out.values.push_back(y ? u.values[*y] : o);
  }
  return out;
}

MappedFunction smooth(const MappedFunction& u, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("smoothing radius must be positive");
  const auto& m = *u.domain;
  MappedFunction out{u.domain, u.target, {}};
  out.values.reserve(m.size());
  if (u.target->kind() == TargetSpace::Kind::FiniteMetric) {
    const auto& tgt = u.target->finite_space();
    const Eigen::MatrixXd emb = kuratowski_embed(tgt, 0);
    for (std::size_t x = 0; x < m.size(); ++x) {
      Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(emb.cols());
      double sw = 0.0;
      for (auto y : m.ball(x, eps)) {
        avg += m.weight(y) * emb.row(static_cast<Eigen::Index>(u.values[y].index()));
        sw += m.weight(y);
      }
      avg /= sw;
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (Eigen::Index q = 0; q < emb.rows(); ++q) {
        const double d = (emb.row(q) - avg).cwiseAbs().maxCoeff();
        if (d < best) {
          best = d;
          arg = static_cast<std::size_t>(q);
        }
      }
      out.values.push_back(TargetPoint(arg));
    }
    return out;
  }
  std::vector<TargetPoint> pts;
  std::vector<double> w;
  for (std::size_t x = 0; x < m.size(); ++x) {
    pts.clear();
    w.clear();
    for (auto y : m.ball(x, eps)) {
      pts.push_back(u.values[y]);
      w.push_back(m.weight(y));
    }
    out.values.push_back(frechet_mean(*u.target, pts, w));
  }
  return out;
}

LpConvergenceTable lp_convergence_table(const std::vector<MappedFunction>& u_i,
                                        const std::vector<MeasureApproximation>& phi_i,
                                        const MappedFunction& u, double p,
                                        const std::vector<double>& eps) {
  if (u_i.empty()) throw InvalidArgument("empty sequence");
  if (u_i.size() != phi_i.size()) throw InvalidArgument("one measure approximation per map");
  if (eps.empty()) throw InvalidArgument("empty smoothing radius list");
  LpConvergenceTable t;
  t.eps = eps;
  const auto cols = static_cast<Eigen::Index>(u_i.size());
  t.table.resize(static_cast<Eigen::Index>(eps.size()), cols);
  for (std::size_t r = 0; r < eps.size(); ++r) {
    const auto smooth_u = smooth(u, eps[r]);
    for (std::size_t i = 0; i < u_i.size(); ++i) {
      t.table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
          lp_distance(pushforward(smooth_u, phi_i[i]), u_i[i], p);
    }
  }
  const Eigen::Index tail_start = cols / 2;
  for (std::size_t r = 0; r < eps.size(); ++r) {
    t.tail_sup.push_back(
        t.table.row(static_cast<Eigen::Index>(r)).segment(tail_start, cols - tail_start).maxCoeff());
  }
  std::vector<double> sorted = eps;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[(sorted.size() - 1) / 2];
  for (std::size_t r = 0; r < eps.size(); ++r)
    if (eps[r] <= cut) t.diagnostic = std::max(t.diagnostic, t.tail_sup[r]);
  return t;
}

double check_measure_approximation(const MeasureApproximation& phi,
                                   const std::vector<TestFunction>& dictionary) {
  if (dictionary.empty()) throw InvalidArgument("empty test-function dictionary");
  const auto& src = *phi.source();
  const auto& tgt = *phi.target();
  double worst = 0.0;
  for (const auto& f : dictionary) {
    double pushed = 0.0;
    for (std::size_t x = 0; x < src.size(); ++x)
      if (auto y = phi(x)) pushed += f(tgt, *y) * src.weight(x);
    double direct = 0.0;
    for (std::size_t y = 0; y < tgt.size(); ++y) direct += f(tgt, y) * tgt.weight(y);
    worst = std::max(worst, std::abs(pushed - direct));
  }
  return worst;
}

AsymptoticRelationReport asymptotic_relation_diagnostics(
    const FiniteMetricMeasureSpace& x, const std::vector<SpacePtr>& x_i,
    const std::vector<std::vector<std::size_t>>& f_i,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (x_i.size() != f_i.size()) throw InvalidArgument("one map per space in the sequence");
  AsymptoticRelationReport rep;
  rep.pairs = pairs;
  rep.traces.resize(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(x_i.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    if (a >= x.size() || b >= x.size()) throw InvalidArgument("sample pair out of range");
    for (std::size_t i = 0; i < x_i.size(); ++i) {
      const auto& f = f_i[i];
      if (f.size() != x.size()) throw InvalidArgument("map must be defined on all of X");
      if (f[a] >= x_i[i]->size() || f[b] >= x_i[i]->size()) throw InvalidArgument("map value out of range");
      rep.traces(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          std::abs(x_i[i]->distance(f[a], f[b]) - x.distance(a, b));
    }
  }
  const auto last = rep.traces.cols() - 1;
  for (Eigen::Index k = 0; k < rep.traces.rows(); ++k) {
    const double tol = 1e-12 * std::max(1.0, x.diameter());
    rep.blowup.push_back(last >= 0 && rep.traces(k, last) > rep.traces(k, 0) + tol);
    if (last >= 0) rep.final_max = std::max(rep.final_max, rep.traces(k, last));
  }
  return rep;
}

}  // namespace mmvlab
