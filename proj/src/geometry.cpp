#include "mmvlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

namespace {

void require_geodesics(const TargetSpace& y) {
  if (!y.has_geodesics()) {
    throw InvalidArgument(fmt::format("target {} has no geodesic structure", y.describe()));
  }
}

void check_weights(std::span<const TargetPoint> points, std::span<const double> weights) {
  if (points.empty()) throw InvalidArgument("mean of an empty point set");
  if (points.size() != weights.size()) throw InvalidArgument("points and weights differ in length");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidArgument("mean weights must be positive");
}

TargetPoint tree_mean(const MetricTree& tree, std::span<const TargetPoint> points,
                      std::span<const double> weights) {
  double best = std::numeric_limits<double>::infinity();
  TreePoint arg{};
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    const auto& edge = tree.edge(e);
    const double len = edge.length;
    // Position of every point on the line through edge e, offset from `from`.
    double sw = 0.0;
    double swc = 0.0;
    std::vector<double> c(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      const auto& q = points[j].tree_point();
      if (q.edge == e) {
        c[j] = q.offset;
      } else {
        const double da = tree.distance_to_vertex(edge.from, q);
        const double db = tree.distance_to_vertex(edge.to, q);
        c[j] = da <= db ? -da : len + db;
      }
      sw += weights[j];
      swc += weights[j] * c[j];
    }
    const double t = std::clamp(swc / sw, 0.0, len);
    double f = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) f += weights[j] * (t - c[j]) * (t - c[j]);
    if (f < best) {
      best = f;
      arg = {e, t};
    }
  }
  return TargetPoint(arg);
}

// Squared distance from x to geodesic(a, b, t) as a sum of per-factor terms:
// Euclidean h^2 + (tL - s)^2, tree (h + |tL - s|)^2 with s the Gromov product.
struct FactorProfile {
  bool tree = false;
  double len = 0.0;
  double s = 0.0;
  double h = 0.0;
};

bool collect_profile(const TargetSpace& y, const TargetPoint& x, const TargetPoint& a,
                     const TargetPoint& b, std::vector<FactorProfile>& out) {
  switch (y.kind()) {
    case TargetSpace::Kind::Euclidean: {
      const Eigen::VectorXd ab = b.coords() - a.coords();
      const Eigen::VectorXd ax = x.coords() - a.coords();
      const double len = ab.norm();
      const double s = len > 0.0 ? ax.dot(ab) / len : 0.0;
      out.push_back({false, len, s, std::sqrt(std::max(0.0, ax.squaredNorm() - s * s))});
      return true;
    }
    case TargetSpace::Kind::Tree: {
      const double len = y.distance(a, b);
      const double dax = y.distance(a, x);
      const double s = std::clamp(0.5 * (dax + len - y.distance(b, x)), 0.0, len);
      out.push_back({true, len, s, std::max(0.0, dax - s)});
      return true;
    }
    case TargetSpace::Kind::Product:
      for (std::size_t i = 0; i < y.factors().size(); ++i) {
        const auto& f = *y.factors()[i];
        if (f.kind() == TargetSpace::Kind::Product) return false;
        if (!collect_profile(f, x.parts()[i], a.parts()[i], b.parts()[i], out)) return false;
      }
      return true;
    case TargetSpace::Kind::FiniteMetric:
      break;
  }
  return false;
}

// Exact minimizer of the piecewise quadratic profile over [0, 1].
double profile_argmin(const std::vector<FactorProfile>& prof) {
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& f : prof)
    if (f.tree && f.len > 0.0) cuts.push_back(std::clamp(f.s / f.len, 0.0, 1.0));
  std::sort(cuts.begin(), cuts.end());
  auto value = [&](double t) {
    double v = 0.0;
    for (const auto& f : prof) {
      const double m = t * f.len - f.s;
      v += f.tree ? (f.h + std::abs(m)) * (f.h + std::abs(m)) : f.h * f.h + m * m;
    }
    return v;
  };
  double best_t = 0.0;
  double best = value(0.0);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double mid = 0.5 * (lo + hi);
    double qa = 0.0;
    double qb = 0.0;
    for (const auto& f : prof) {
      qa += f.len * f.len;
      const double sigma = f.tree ? (mid * f.len - f.s < 0.0 ? -1.0 : 1.0) : 1.0;
      qb += f.tree ? 2.0 * sigma * f.len * (f.h - sigma * f.s) : -2.0 * f.len * f.s;
    }
    for (double t : {lo, hi, qa > 0.0 ? std::clamp(-qb / (2.0 * qa), lo, hi) : lo}) {
      const double v = value(t);
      if (v < best) {
        best = v;
        best_t = t;
      }
    }
  }
  return best_t;
}

}  // namespace

TargetPoint geodesic(const TargetSpace& y, const TargetPoint& a, const TargetPoint& b, double t) {
  require_geodesics(y);
  t = std::clamp(t, 0.0, 1.0);
  switch (y.kind()) {
    case TargetSpace::Kind::Euclidean:
      return TargetPoint(Eigen::VectorXd((1.0 - t) * a.coords() + t * b.coords()));
    case TargetSpace::Kind::Tree:
      return TargetPoint(y.metric_tree().geodesic(a.tree_point(), b.tree_point(), t));
    case TargetSpace::Kind::Product: {
      std::vector<TargetPoint> parts;
      for (std::size_t i = 0; i < y.factors().size(); ++i)
        parts.push_back(geodesic(*y.factors()[i], a.parts()[i], b.parts()[i], t));
      return TargetPoint(std::move(parts));
    }
    case TargetSpace::Kind::FiniteMetric:
      break;
  }
  throw InvalidArgument("no geodesics");
}

SegmentProjection project_to_geodesic(const TargetSpace& y, const TargetPoint& x,
                                      const TargetPoint& a, const TargetPoint& b) {
  require_geodesics(y);
  const double len = y.distance(a, b);
  if (len == 0.0) return {a, 0.0};
  if (y.kind() == TargetSpace::Kind::Euclidean) {
    const Eigen::VectorXd ab = b.coords() - a.coords();
    const double t = std::clamp((x.coords() - a.coords()).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return {geodesic(y, a, b, t), t};
  }
  if (std::vector<FactorProfile> prof; collect_profile(y, x, a, b, prof)) {
    const double t = profile_argmin(prof);
    return {geodesic(y, a, b, t), t};
  }
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double t) { return y.distance(x, geodesic(y, a, b, t)); };
  double lo = 0.0;
  double hi = 1.0;
  double m1 = hi - g * (hi - lo);
  double m2 = lo + g * (hi - lo);
  double f1 = f(m1);
  double f2 = f(m2);
  while (hi - lo > 1e-11) {
    if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - g * (hi - lo);
      f1 = f(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + g * (hi - lo);
      f2 = f(m2);
    }
  }
  // The endpoints are candidates too: the minimum may sit on the boundary.
  double t = 0.5 * (lo + hi);
  double ft = f(t);
  for (double cand : {0.0, 1.0}) {
    const double fc = f(cand);
    if (fc < ft) {
      ft = fc;
      t = cand;
    }
  }
  return {geodesic(y, a, b, t), t};
}

double frechet_objective(const TargetSpace& y, const TargetPoint& m,
                         std::span<const TargetPoint> points, std::span<const double> weights) {
  double s = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double d = y.distance(m, points[j]);
    s += weights[j] * d * d;
  }
  return s;
}

TargetPoint frechet_mean(const TargetSpace& y, std::span<const TargetPoint> points,
                         std::span<const double> weights) {
  check_weights(points, weights);
  switch (y.kind()) {
    case TargetSpace::Kind::Euclidean: {
      Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(y.dim()));
      double sw = 0.0;
      for (std::size_t j = 0; j < points.size(); ++j) {
        m += weights[j] * points[j].coords();
        sw += weights[j];
      }
      return TargetPoint(Eigen::VectorXd(m / sw));
    }
    case TargetSpace::Kind::Tree:
      return tree_mean(y.metric_tree(), points, weights);
    case TargetSpace::Kind::FiniteMetric: {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t q = 0; q < y.finite_space().size(); ++q) {
        const double f = frechet_objective(y, TargetPoint(q), points, weights);
        if (f < best) {
          best = f;
          arg = q;
        }
      }
      return TargetPoint(arg);
    }
    case TargetSpace::Kind::Product: {
      std::vector<TargetPoint> parts;
      std::vector<TargetPoint> comp(points.size());
      for (std::size_t i = 0; i < y.factors().size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) comp[j] = points[j].parts()[i];
        parts.push_back(frechet_mean(*y.factors()[i], comp, weights));
      }
      return TargetPoint(std::move(parts));
    }
  }
  return {};
}

TargetPoint inductive_mean(const TargetSpace& y, std::span<const TargetPoint> points,
                           std::span<const double> weights, std::size_t passes) {
  check_weights(points, weights);
  require_geodesics(y);
  TargetPoint m = points[0];
  double total = weights[0];
  for (std::size_t pass = 0; pass < std::max<std::size_t>(passes, 1); ++pass) {
    for (std::size_t j = pass == 0 ? 1 : 0; j < points.size(); ++j) {
      total += weights[j];
      m = geodesic(y, m, points[j], weights[j] / total);
    }
  }
  return m;
}

double comparison_slack(const TargetSpace& y, const TargetPoint& a, const TargetPoint& b,
                        const TargetPoint& c, double t) {
  const double ab = y.distance(a, b);
  const double ac = y.distance(a, c);
  const double bc = y.distance(b, c);
  const double ap = y.distance(a, geodesic(y, b, c, t));
  return (1.0 - t) * ab * ab + t * ac * ac - t * (1.0 - t) * bc * bc - ap * ap;
}

double comparison_slack(const TargetSpace& y, const TargetPoint& a, const TargetPoint& b,
                        const TargetPoint& c, double s, double t) {
  const double ab = y.distance(a, b);
  const double ac = y.distance(a, c);
  const double bc = y.distance(b, c);
  // Planar triangle: a~ at the origin, b~ on the x-axis.
  double cosang = 1.0;
  if (ab > 0.0 && ac > 0.0) cosang = std::clamp((ab * ab + ac * ac - bc * bc) / (2 * ab * ac), -1.0, 1.0);
  const double sinang = std::sqrt(std::max(0.0, 1.0 - cosang * cosang));
  const double px = s * ab;
  const double qx = t * ac * cosang;
  const double qy = t * ac * sinang;
  const double model = std::hypot(px - qx, qy);
  const double actual = y.distance(geodesic(y, a, b, s), geodesic(y, a, c, t));
  return model - actual;
}

}  // namespace mmvlab
