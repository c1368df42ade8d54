#include "mmvlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "mmvlab/covering.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/geometry.hpp"

namespace mmvlab {

std::optional<double> EnergyConfig::theta_at(double r) const {
  if (theta.empty()) return std::nullopt;
  auto t = theta;
  std::sort(t.begin(), t.end());
  if (r < t.front().first || r > t.back().first) {
    const double tol = 1e-12 * std::max(1.0, std::abs(r));
    if (std::abs(r - t.front().first) <= tol) return t.front().second;
    if (std::abs(r - t.back().first) <= tol) return t.back().second;
    return std::nullopt;
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (r <= t[i].first) {
      const double span = t[i].first - t[i - 1].first;
      if (span == 0.0) return t[i].second;
      const double s = (r - t[i - 1].first) / span;
      return (1 - s) * t[i - 1].second + s * t[i].second;
    }
  }
  return t.back().second;
}

EnergyForm::EnergyForm(SpacePtr domain, EnergyConfig config)
    : domain_(std::move(domain)), config_(std::move(config)) {
  if (!domain_) throw InvalidArgument("energy form needs a domain");
  if (!(config_.p >= 1.0)) throw InvalidArgument("energy exponent p must be >= 1");
  if (!(config_.rho > 0.0)) throw InvalidArgument("energy radius rho must be positive");
  if (!(config_.kappa > 0.0 && config_.kappa <= 1.0)) throw InvalidArgument("kappa must lie in (0, 1]");
  const auto& m = *domain_;
  const auto n = m.size();
  const double rho = config_.rho;
  b_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) b_(static_cast<Eigen::Index>(x)) = m.ball_mass(x, rho);
  if (config_.b_mode == EnergyConfig::BMode::UserTable) {
    if (static_cast<std::size_t>(config_.b_table.size()) != n) {
      throw InvalidArgument(fmt::format("b table has {} entries for {} points", config_.b_table.size(), n));
    }
    for (std::size_t x = 0; x < n; ++x) {
      const double vol = b_(static_cast<Eigen::Index>(x));
      const double bx = config_.b_table(static_cast<Eigen::Index>(x));
      const double tol = 1e-12 * vol;
      if (bx < vol - tol || config_.kappa * bx > vol + tol) {
        throw InvalidArgument(fmt::format(
            "b({}, rho) = {} breaks kappa b <= |B| <= b with |B| = {}, kappa = {}", x, bx, vol,
            config_.kappa));
      }
    }
    b_ = config_.b_table;
  }
  const double near = 1e-9 * m.diameter();
  rows_.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double bx = b_(static_cast<Eigen::Index>(x));
    for (std::size_t y = 0; y < n; ++y) {
      const double d = m.distance(x, y);
      if (y > x && std::abs(d - rho) < near) {
        warnings_.push_back(fmt::format("d({}, {}) = {} is within 1e-9 diameter of rho", x, y, d));
      }
      if (y == x || !(d > 0.0) || !(d < rho)) continue;
      const double h = config_.h_mode == EnergyConfig::HMode::ConstantRho ? rho : d;
      rows_[x].push_back({y, m.weight(x) * m.weight(y) / (bx * std::pow(h, config_.p))});
    }
  }
}

std::size_t EnergyForm::nonzeros() const {
  std::size_t s = 0;
  for (const auto& r : rows_) s += r.size();
  return s;
}

std::size_t EnergyForm::components() const {
  const auto n = rows_.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::size_t comps = n;
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& e : rows_[x]) {
      const auto a = find(x);
      const auto b = find(e.y);
      if (a != b) {
        parent[a] = b;
        --comps;
      }
    }
  }
  return comps;
}

namespace {

void check_map(const EnergyForm& form, const MappedFunction& u) {
  if (u.values.size() != form.domain()->size()) {
    throw InvalidArgument("map and energy form live on different domains");
  }
}

double power(double d, double p) { return p == 2.0 ? d * d : std::pow(d, p); }

}  // namespace

Eigen::VectorXd energy_density(const EnergyForm& form, const MappedFunction& u) {
  check_map(form, u);
  const auto& m = *form.domain();
  const double p = form.config().p;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.size()));
  for (std::size_t x = 0; x < m.size(); ++x) {
    double s = 0.0;
    for (const auto& k : form.kernel()[x]) s += k.k * power(u.target->distance(u.values[x], u.values[k.y]), p);
    e(static_cast<Eigen::Index>(x)) = s / m.weight(x);
  }
  return e;
}

double energy(const EnergyForm& form, const MappedFunction& u) {
  check_map(form, u);
  const double p = form.config().p;
  double s = 0.0;
  for (std::size_t x = 0; x < form.kernel().size(); ++x)
    for (const auto& k : form.kernel()[x]) s += k.k * power(u.target->distance(u.values[x], u.values[k.y]), p);
  return 0.5 * s;
}

double energy(const EnergyForm& form, const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != form.domain()->size()) {
    throw InvalidArgument("vector and energy form live on different domains");
  }
  const double p = form.config().p;
  double s = 0.0;
  for (std::size_t x = 0; x < form.kernel().size(); ++x)
    for (const auto& k : form.kernel()[x])
      s += k.k * power(std::abs(u(static_cast<Eigen::Index>(x)) - u(static_cast<Eigen::Index>(k.y))), p);
  return 0.5 * s;
}

double Generator::bilinear(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return u.dot(weight.asDiagonal() * (matrix * v));
}

Eigen::MatrixXd Generator::stiffness() const { return weight.asDiagonal() * matrix; }

Generator assemble_generator(const EnergyForm& form) {
  if (form.config().p != 2.0) {
    throw InvalidArgument("the generator is only defined for the quadratic case p = 2");
  }
  const auto& m = *form.domain();
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t x = 0; x < m.size(); ++x)
    for (const auto& k : form.kernel()[x]) {
      s(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(k.y)) += 0.5 * k.k;
      s(static_cast<Eigen::Index>(k.y), static_cast<Eigen::Index>(x)) += 0.5 * k.k;
    }
  Eigen::MatrixXd l = -s;
  l.diagonal() = s.rowwise().sum();
  Generator g;
  g.weight = m.weight();
  g.matrix = g.weight.cwiseInverse().asDiagonal() * l;
  return g;
}

std::vector<ConditionMRow> check_condition_M(SpacePtr domain, const EnergyConfig& config,
                                             const std::vector<MappedFunction>& maps,
                                             const std::vector<double>& r_grid) {
  if (config.b_mode != EnergyConfig::BMode::BallVolume) {
    throw InvalidArgument("condition (M) needs b(x, R) for every R; use ball-volume mode");
  }
  const EnergyForm base(domain, config);
  std::vector<Eigen::VectorXd> e_rho;
  for (const auto& u : maps) e_rho.push_back(energy_density(base, u));
  std::vector<ConditionMRow> out;
  for (double r : r_grid) {
    if (!(config.rho <= r / 2)) {
      throw InvalidArgument(fmt::format("condition (M) needs rho <= R/2, got rho = {}, R = {}", config.rho, r));
    }
    EnergyConfig cr = config;
    cr.rho = r;
    const EnergyForm form_r(domain, cr);
    ConditionMRow row;
    row.r = r;
    row.theta = config.theta_at(r);
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const auto e_r = energy_density(form_r, maps[k]);
      for (Eigen::Index x = 0; x < e_r.size(); ++x) {
        double ratio = 0.0;
        if (e_rho[k](x) > 0.0) {
          ratio = e_r(x) / e_rho[k](x);
        } else if (e_r(x) > 0.0) {
          ratio = std::numeric_limits<double>::infinity();
        }
        if (ratio > row.max_ratio) {
          row.max_ratio = ratio;
          row.worst_map = k;
          row.worst_point = static_cast<std::size_t>(x);
        }
      }
    }
    row.violated = std::isinf(row.max_ratio) || (row.theta && row.max_ratio > *row.theta);
    out.push_back(row);
  }
  return out;
}

namespace {

// Breakpoints t in [rho, R) at which the closed balls {d <= t}, {d <= c t} change.
std::vector<double> breakpoints(const FiniteMetricMeasureSpace& m, std::size_t x, double c,
                                double rho, double big_r) {
  std::vector<double> t{rho};
  for (std::size_t y = 0; y < m.size(); ++y) {
    for (double v : {m.distance(x, y), m.distance(x, y) / c}) {
      if (v > rho && v < big_r) t.push_back(v);
    }
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::vector<std::size_t> closed_ball(const FiniteMetricMeasureSpace& m, std::size_t x, double r) {
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < m.size(); ++y)
    if (m.distance(x, y) <= r) out.push_back(y);
  return out;
}

double pair_integral(const MappedFunction& u, const std::vector<std::size_t>& ball, double p) {
  const auto& m = *u.domain;
  double s = 0.0;
  double vol = 0.0;
  for (auto y : ball) {
    vol += m.weight(y);
    for (auto z : ball) {
      if (z == y) continue;
      s += m.weight(y) * m.weight(z) * power(u.target->distance(u.values[y], u.values[z]), p);
    }
  }
  return s / vol;
}

}  // namespace

PoincareCertificate poincare_certificate(const EnergyForm& form,
                                         const std::vector<MappedFunction>& maps, double c,
                                         double R) {
  if (!(c >= 1.0)) throw InvalidArgument("Poincaré certificate needs c >= 1");
  if (maps.empty()) throw InvalidArgument("Poincaré certificate needs sample maps");
  const auto& cfg = form.config();
  if (!(R > cfg.rho)) throw InvalidArgument("Poincaré certificate needs R > rho");
  const auto& m = *form.domain();
  PoincareCertificate cert;
  cert.p = cfg.p;
  cert.c = c;
  cert.rho = cfg.rho;
  cert.R = R;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto& u = maps[k];
    const Eigen::VectorXd e = energy_density(form, u);
    const Eigen::VectorXd mass = 0.5 * m.weight().cwiseProduct(e);
    for (std::size_t x = 0; x < m.size(); ++x) {
      for (double t : breakpoints(m, x, c, cfg.rho, R)) {
        PoincareBall b;
        b.map = k;
        b.x = x;
        b.r = t;
        b.lhs = pair_integral(u, closed_ball(m, x, t), cfg.p);
        for (auto y : closed_ball(m, x, c * t)) b.mu += mass(static_cast<Eigen::Index>(y));
        if (b.lhs == 0.0) {
          b.ratio = 0.0;
        } else if (b.mu == 0.0) {
          b.ratio = std::numeric_limits<double>::infinity();
          cert.feasible = false;
          ++cert.infeasible_balls;
        } else {
          b.ratio = b.lhs / (std::pow(t, cfg.p) * b.mu);
        }
        if (std::isfinite(b.ratio) && b.ratio > cert.C) {
          cert.C = b.ratio;
          cert.worst = b;
        }
        cert.table.push_back(b);
      }
    }
  }
  for (auto& b : cert.table) {
    b.slack = std::isfinite(b.ratio) ? cert.C * std::pow(b.r, cfg.p) * b.mu - b.lhs
                                     : -std::numeric_limits<double>::infinity();
  }
  return cert;
}

PoincareBoundCheck poincare_bound_check(const EnergyForm& form,
                                        const std::vector<MappedFunction>& maps, double R) {
  if (maps.empty()) throw InvalidArgument("bound check needs sample maps");
  const auto& cfg = form.config();
  if (cfg.b_mode != EnergyConfig::BMode::BallVolume) {
    throw InvalidArgument("measuring Theta needs ball-volume mode");
  }
  const auto& m = *form.domain();
  const double p = cfg.p;
  std::vector<Eigen::VectorXd> e_rho;
  for (const auto& u : maps) e_rho.push_back(energy_density(form, u));

  // Theta measured at 2t, approached from above: closed balls {d <= 2t}.
  std::map<double, double> theta_cache;
  auto theta = [&](double t) {
    auto it = theta_cache.find(t);
    if (it != theta_cache.end()) return it->second;
    const double big = 2.0 * t;
    double worst = 0.0;
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const auto& u = maps[k];
      for (std::size_t x = 0; x < m.size(); ++x) {
        double bx = 0.0;
        double s = 0.0;
        for (std::size_t y = 0; y < m.size(); ++y) {
          const double d = m.distance(x, y);
          if (d > big) continue;
          bx += m.weight(y);
          if (y == x || d == 0.0) continue;
          const double h = cfg.h_mode == EnergyConfig::HMode::ConstantRho ? big : d;
          s += m.weight(y) * power(u.target->distance(u.values[x], u.values[y]) / h, p);
        }
        const double e_big = s / bx;
        const double e_small = e_rho[k](static_cast<Eigen::Index>(x));
        if (e_small > 0.0) {
          worst = std::max(worst, e_big / e_small);
        } else if (e_big > 0.0) {
          worst = std::numeric_limits<double>::infinity();
        }
      }
    }
    theta_cache.emplace(t, worst);
    return worst;
  };

  PoincareBoundCheck out;
  out.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto& u = maps[k];
    for (std::size_t x = 0; x < m.size(); ++x) {
      for (double t : breakpoints(m, x, 1.0, cfg.rho, R)) {
        const auto ball = closed_ball(m, x, t);
        const double lhs = pair_integral(u, ball, p);
        if (lhs == 0.0) continue;
        double energy_mass = 0.0;
        for (auto y : ball) energy_mass += m.weight(y) * e_rho[k](static_cast<Eigen::Index>(y));
        PoincareBoundRow row;
        row.map = k;
        row.x = x;
        row.r = t;
        row.ratio = energy_mass > 0.0 ? lhs / (std::pow(t, p) * energy_mass)
                                      : std::numeric_limits<double>::infinity();
        row.theta = theta(t);
        row.bound = std::pow(2.0, p + 1) * row.theta / cfg.kappa;
        const double excess = row.ratio - row.bound;
        if (excess > out.worst_excess) {
          out.worst_excess = excess;
          out.worst = row;
        }
        out.rows.push_back(row);
      }
    }
  }
  if (out.rows.empty()) out.worst_excess = 0.0;
  return out;
}

StepMap step_map(const MappedFunction& u, double r, std::optional<std::uint64_t> seed) {
  const auto& m = *u.domain;
  StepMap s{MappedFunction{u.domain, u.target, {}}, maximal_r_discrete_net(m, r, seed), {}};
  const auto none = std::numeric_limits<std::size_t>::max();
  s.cell.assign(m.size(), none);
  for (std::size_t k = 0; k < s.centers.size(); ++k)
    for (auto y : m.ball(s.centers[k], r))
      if (s.cell[y] == none) s.cell[y] = k;

  std::vector<TargetPoint> cell_value(s.centers.size());
  const Eigen::MatrixXd emb = u.target->kind() == TargetSpace::Kind::FiniteMetric
                                  ? kuratowski_embed(u.target->finite_space(), 0)
                                  : Eigen::MatrixXd();
  for (std::size_t k = 0; k < s.centers.size(); ++k) {
    std::vector<TargetPoint> pts;
    std::vector<double> w;
    for (std::size_t y = 0; y < m.size(); ++y) {
      if (s.cell[y] != k) continue;
      pts.push_back(u.values[y]);
      w.push_back(m.weight(y));
    }
    if (u.target->kind() == TargetSpace::Kind::FiniteMetric) {
      Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(emb.cols());
      double sw = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        avg += w[j] * emb.row(static_cast<Eigen::Index>(pts[j].index()));
        sw += w[j];
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
      cell_value[k] = TargetPoint(arg);
    } else {
      cell_value[k] = frechet_mean(*u.target, pts, w);
    }
  }
  s.map.values.reserve(m.size());
  for (std::size_t y = 0; y < m.size(); ++y) s.map.values.push_back(cell_value[s.cell[y]]);
  return s;
}

CompactnessWitness compactness_witness(const std::vector<MappedFunction>& u_i,
                                       const std::vector<EnergyForm>& forms,
                                       const std::vector<double>& radii, double p,
                                       double energy_bound, double growth_limit) {
  if (u_i.empty() || radii.empty()) throw InvalidArgument("compactness witness needs maps and radii");
  if (forms.size() != u_i.size()) throw InvalidArgument("one energy form per map");
  CompactnessWitness w;
  w.radii = radii;
  const auto rows = static_cast<Eigen::Index>(radii.size());
  const auto cols = static_cast<Eigen::Index>(u_i.size());
  w.defect.resize(rows, cols);
  w.cauchy.resize(rows, cols);
  w.energies.resize(cols);
  for (std::size_t i = 0; i < u_i.size(); ++i) {
    std::vector<MappedFunction> steps;
    for (double r : radii) steps.push_back(step_map(u_i[i], r).map);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      w.defect(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = lp_distance(u_i[i], steps[j], p);
      w.cauchy(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = lp_distance(steps[j], steps.back(), p);
    }
    w.energies(static_cast<Eigen::Index>(i)) = energy(forms[i], u_i[i]);
  }
  const double e0 = w.energies(0);
  const double emax = w.energies.maxCoeff();
  w.energy_growth = e0 > 0.0 ? emax / e0 : (emax > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  w.energy_unbounded = (energy_bound >= 0.0 && emax > energy_bound) || w.energy_growth > growth_limit;
  return w;
}

}  // namespace mmvlab
