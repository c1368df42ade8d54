#include "mmvlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "mmvlab/error.hpp"
#include "mmvlab/functional.hpp"
#include "mmvlab/parallel.hpp"
#include "mmvlab/samplers.hpp"

namespace mmvlab {

ConvergenceReport mosco_resolvent_experiment(const std::vector<MeasureApproximation>& phi_i,
                                             const EnergyConfig& config,
                                             const std::vector<double>& lambdas,
                                             const std::vector<Eigen::VectorXd>& probes) {
  if (phi_i.empty() || lambdas.empty() || probes.empty()) {
    throw InvalidArgument("mosco experiment needs spaces, lambdas and probes");
  }
  const SpacePtr limit = phi_i.front().target();
  for (const auto& phi : phi_i)
    if (phi.target() != limit) throw InvalidArgument("every measure approximation must land in the same limit space");
  const auto e_lim = ConvexFunctional::from_energy(EnergyForm(limit, config), TargetSpace::real());

  ConvergenceReport rep;
  rep.experiment = "mosco_resolvent";
  rep.axis_name = "i";
  for (std::size_t i = 0; i < phi_i.size(); ++i) rep.axis.push_back(static_cast<double>(i + 1));
  const auto rows = static_cast<Eigen::Index>(2 * lambdas.size() * probes.size());
  rep.traces.resize(rows, static_cast<Eigen::Index>(phi_i.size()));

  std::vector<MappedFunction> limit_probe;
  for (const auto& p : probes) limit_probe.push_back(MappedFunction::real(limit, p));
  // J u and E^lambda(u) on the limit space, per (lambda, probe).
  std::vector<MappedFunction> j_lim;
  std::vector<double> my_lim;
  for (double lambda : lambdas) {
    for (const auto& u : limit_probe) {
      auto j = resolvent(e_lim, u, lambda);
      const double d = lp_distance(u, j, 2.0);
      my_lim.push_back(lambda * e_lim(j) + d * d);
      j_lim.push_back(std::move(j));
    }
  }
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    for (std::size_t q = 0; q < probes.size(); ++q) {
      rep.trace_names.push_back(fmt::format("resolvent_defect_l{}_p{}", l, q));
      rep.trace_names.push_back(fmt::format("moreau_yosida_defect_l{}_p{}", l, q));
    }
  }
  parallel_for(phi_i.size(), [&](std::size_t i) {
    const auto& phi = phi_i[i];
    const auto e_i = ConvexFunctional::from_energy(EnergyForm(phi.source(), config), TargetSpace::real());
    Eigen::Index row = 0;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      for (std::size_t q = 0; q < probes.size(); ++q) {
        const auto pushed = pushforward(limit_probe[q], phi);
        const auto j_i = resolvent(e_i, pushed, lambdas[l]);
        const auto k = l * probes.size() + q;
        const double d = lp_distance(pushed, j_i, 2.0);
        const double my_i = lambdas[l] * e_i(j_i) + d * d;
        rep.traces(row++, static_cast<Eigen::Index>(i)) = lp_distance(j_i, pushforward(j_lim[k], phi), 2.0);
        rep.traces(row++, static_cast<Eigen::Index>(i)) = std::abs(my_i - my_lim[k]);
      }
    }
  });
  rep.summary.emplace_back("final_max_resolvent_defect",
                           rep.traces.col(rep.traces.cols() - 1)(Eigen::seq(0, rows - 1, 2)).maxCoeff());
  rep.summary.emplace_back("final_max_moreau_yosida_defect",
                           rep.traces.col(rep.traces.cols() - 1)(Eigen::seq(1, rows - 1, 2)).maxCoeff());
  return rep;
}

MappingSpaceSample sample_mapping_space(SpacePtr domain, TargetPtr target,
                                        const std::vector<TargetPoint>& grid,
                                        const std::function<double(const MappedFunction&)>& energy,
                                        std::size_t cap) {
  if (grid.empty()) throw InvalidArgument("empty target grid");
  const auto n = domain->size();
  double count = std::pow(static_cast<double>(grid.size()), static_cast<double>(n));
  if (count > static_cast<double>(cap)) {
    throw InvalidArgument(fmt::format("{} maps exceed the sampling cap {}", count, cap));
  }
  MappingSpaceSample s;
  std::vector<std::size_t> digits(n, 0);
  const auto total = static_cast<std::size_t>(count);
  for (std::size_t idx = 0; idx < total; ++idx) {
    MappedFunction u{domain, target, {}};
    for (std::size_t x = 0; x < n; ++x) u.values.push_back(grid[digits[x]]);
    s.energy.push_back(energy(u));
    s.maps.push_back(std::move(u));
    for (std::size_t x = n; x-- > 0;) {
      if (++digits[x] < grid.size()) break;
      digits[x] = 0;
    }
  }
  return s;
}

namespace {

FiniteMetricMeasureSpace sublevel_space(const MappingSpaceSample& s, double level) {
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < s.maps.size(); ++k)
    if (s.energy[k] <= level) keep.push_back(k);
  if (keep.empty()) throw InvalidArgument(fmt::format("sublevel set at level {} is empty", level));
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a + 1; b < m; ++b)
      d(a, b) = d(b, a) = lp_distance(s.maps[keep[static_cast<std::size_t>(a)]], s.maps[keep[static_cast<std::size_t>(b)]], 2.0);
  return FiniteMetricMeasureSpace::trusted(std::move(d), Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
}

}  // namespace

ConvergenceReport sublevel_gh_experiment(const std::vector<MappingSpaceSample>& stages,
                                         const MappingSpaceSample& limit, double c,
                                         const GhSearchBudget& budget, std::vector<double> levels) {
  if (stages.empty()) throw InvalidArgument("sublevel experiment needs stages");
  if (levels.empty()) {
    for (std::size_t i = 1; i <= stages.size(); ++i) levels.push_back(c * (1.0 + 1.0 / static_cast<double>(i)));
  }
  if (levels.size() != stages.size()) throw InvalidArgument("one level per stage");
  const auto x = sublevel_space(limit, c);
  ConvergenceReport rep;
  rep.experiment = "sublevel_gh";
  rep.axis_name = "i";
  rep.trace_names = {"level", "sublevel_size", "gh_upper", "gh_lower"};
  rep.traces.resize(4, static_cast<Eigen::Index>(stages.size()));
  parallel_for(stages.size(), [&](std::size_t i) {
    const auto xi = sublevel_space(stages[i], levels[i]);
    const auto up = gh_upper(xi, x, budget);
    const auto col = static_cast<Eigen::Index>(i);
    rep.traces(0, col) = levels[i];
    rep.traces(1, col) = static_cast<double>(xi.size());
    rep.traces(2, col) = up.bound;
    rep.traces(3, col) = gh_lower(xi, x);
  });
  for (std::size_t i = 0; i < stages.size(); ++i) rep.axis.push_back(static_cast<double>(i + 1));
  rep.summary.emplace_back("limit_size", static_cast<double>(x.size()));
  rep.summary.emplace_back("initial_gh_upper", rep.traces(2, 0));
  rep.summary.emplace_back("final_gh_upper", rep.traces(2, rep.traces.cols() - 1));
  return rep;
}

ConvergenceReport two_point_sublevel_experiment(const TwoPointParams& params) {
  if (params.y_grid.empty() || params.deltas.empty()) throw InvalidArgument("two-point experiment needs a grid and deltas");
  if (!(params.alpha > 0.0 && params.beta > 0.0)) throw InvalidArgument("weights must be positive");
  std::vector<TargetPoint> grid;
  for (double y : params.y_grid) grid.push_back(TargetPoint::real(y));
  const auto real = TargetSpace::real();
  std::vector<MappingSpaceSample> stages;
  for (double delta : params.deltas) {
    if (!(delta > 0.0)) throw InvalidArgument("deltas must be positive");
    Eigen::MatrixXd d(2, 2);
    d << 0.0, delta, delta, 0.0;
    Eigen::VectorXd w(2);
    w << params.alpha, params.beta;
    auto mi = share(FiniteMetricMeasureSpace::validated(d, w, fmt::format("two_point({})", delta)));
    const ConvexFunctional e(mi, real, 2.0, {{0, 1, 1.0 / (delta * delta)}});
    stages.push_back(sample_mapping_space(mi, real, grid, [&](const MappedFunction& u) { return e(u); }));
  }
  auto m = share(FiniteMetricMeasureSpace::validated(Eigen::MatrixXd::Zero(1, 1),
                                                     Eigen::VectorXd::Constant(1, params.alpha + params.beta), "point"));
  const auto limit = sample_mapping_space(m, real, grid, [](const MappedFunction&) { return 0.0; });
  auto rep = sublevel_gh_experiment(stages, limit, params.c, params.budget);
  rep.experiment = "two_point_sublevel";
  rep.axis_name = "delta";
  rep.axis = params.deltas;
  // Band |y_a - y_b| <= sqrt(c_i) delta_i around the diagonal; its Hausdorff
  // distance to the diagonal in sqrt(alpha) Y x sqrt(beta) Y.
  const double shrink = std::sqrt(params.alpha * params.beta / (params.alpha + params.beta));
  Eigen::RowVectorXd band(static_cast<Eigen::Index>(params.deltas.size()));
  for (std::size_t i = 0; i < params.deltas.size(); ++i)
    band(static_cast<Eigen::Index>(i)) = std::sqrt(rep.traces(0, static_cast<Eigen::Index>(i))) * params.deltas[i] * shrink;
  rep.trace_names.push_back("band_hausdorff");
  rep.traces.conservativeResize(rep.traces.rows() + 1, Eigen::NoChange);
  rep.traces.row(rep.traces.rows() - 1) = band;
  return rep;
}

namespace {

// Modes (k_1..k_n) of the first `count` reference eigenvalues, value in units of pi^2.
std::vector<std::pair<double, std::vector<std::size_t>>> qcube_modes(std::size_t n, std::size_t count) {
  std::vector<std::pair<double, std::vector<std::size_t>>> modes;
  const std::size_t kmax = count + 1;
  std::vector<std::size_t> k(n, 0);
  while (true) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += std::pow(4.0, static_cast<double>(j)) * static_cast<double>(k[j] * k[j]);
    modes.emplace_back(v, k);
    std::size_t j = 0;
    while (j < n && ++k[j] > kmax) k[j++] = 0;
    if (j == n) break;
  }
  std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  modes.resize(std::min(count, modes.size()));
  return modes;
}

}  // namespace

std::vector<std::pair<double, std::size_t>> qcube_reference(std::size_t n, std::size_t count) {
  if (n == 0) throw InvalidArgument("Q_n needs n >= 1");
  std::vector<std::pair<double, std::size_t>> out;
  for (const auto& [v, k] : qcube_modes(n, count)) {
    if (!out.empty() && out.back().first == v) {
      ++out.back().second;
    } else {
      out.emplace_back(v, 1);
    }
  }
  return out;
}

QcubeResult qcube_experiment(std::size_t n_max, std::size_t per_unit, const EnergyConfig& config,
                             const std::vector<double>& rho_schedule, std::size_t k,
                             double cluster_gap) {
  if (n_max == 0 || n_max > 3) throw InvalidArgument("qcube experiment supports 1 <= n <= 3");
  if (k < 2) throw InvalidArgument("qcube experiment needs k >= 2");
  QcubeResult res;
  auto& rep = res.report;
  rep.experiment = "qcube";
  rep.axis_name = "n";
  for (std::size_t i = 2; i <= k; ++i) rep.trace_names.push_back(fmt::format("ratio_{}_over_2", i));
  rep.traces.resize(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(n_max));
  // Lower dimensions are compared on the same value window as Q_{n_max}.
  const double window = qcube_modes(n_max, k).back().first;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::size_t kn = 0;
    for (const auto& mode : qcube_modes(n, k))
      if (mode.first <= window) ++kn;
    kn = std::max<std::size_t>(kn, 2);
    for (const auto& [v, modes] : qcube_modes(n, kn)) {
      for (std::size_t j = 0; j < n; ++j) {
        const double side = std::pow(0.5, static_cast<double>(j));
        const double intervals = std::max(1.0, std::round(side * static_cast<double>(per_unit)));
        if (modes[j] > 0 && intervals / static_cast<double>(modes[j]) < 8.0) {
          throw InvalidArgument(fmt::format(
              "grid too coarse: Q_{} axis {} has {} intervals for mode {} (need 8 per half-wavelength)",
              n, j + 1, intervals, modes[j]));
        }
      }
    }
    const auto domain = share(sample_qcube(n, per_unit));
    const auto ec = eigen_convergence_experiment(domain, config, rho_schedule, kn);
    res.extrapolated.push_back(ec.extrapolated);
    const double l2 = ec.extrapolated(1);
    Eigen::VectorXd ratios = ec.extrapolated.tail(static_cast<Eigen::Index>(kn - 1)) / l2;
    rep.axis.push_back(static_cast<double>(n));
    auto col = rep.traces.col(static_cast<Eigen::Index>(n - 1));
    col.setConstant(std::numeric_limits<double>::quiet_NaN());
    col.head(ratios.size()) = ratios;
    res.clusters.push_back(cluster(ratios, cluster_gap));
    auto ref = qcube_reference(n, kn);
    if (!ref.empty() && ref.front().first == 0.0) {
      if (--ref.front().second == 0) ref.erase(ref.begin());
    }
    res.reference.push_back(ref);
    std::vector<std::pair<double, std::size_t>> assigned;
    for (const auto& r : ref) assigned.emplace_back(r.first, 0);
    for (Eigen::Index i = 0; i < ratios.size() && !assigned.empty(); ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < assigned.size(); ++c) {
        if (std::abs(std::log(ratios(i) / assigned[c].first)) < std::abs(std::log(ratios(i) / assigned[best].first))) best = c;
      }
      ++assigned[best].second;
    }
    for (std::size_t c = 0; c < assigned.size(); ++c) {
      rep.summary.emplace_back(fmt::format("n{}_reference{}_value", n, c + 1), assigned[c].first);
      rep.summary.emplace_back(fmt::format("n{}_reference{}_expected", n, c + 1), static_cast<double>(ref[c].second));
      rep.summary.emplace_back(fmt::format("n{}_reference{}_assigned", n, c + 1), static_cast<double>(assigned[c].second));
    }
    res.assigned.push_back(std::move(assigned));
    rep.summary.emplace_back(fmt::format("n{}_lambda_2", n), l2);
    rep.summary.emplace_back(fmt::format("n{}_calibration", n), l2 / (M_PI * M_PI));
    for (std::size_t c = 0; c < res.clusters.back().size(); ++c) {
      rep.summary.emplace_back(fmt::format("n{}_cluster{}_value", n, c + 1), res.clusters.back()[c].first);
      rep.summary.emplace_back(fmt::format("n{}_cluster{}_multiplicity", n, c + 1),
                               static_cast<double>(res.clusters.back()[c].second));
    }
  }
  return res;
}

}  // namespace mmvlab
