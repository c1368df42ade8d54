#include "mmvlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "mmvlab/cat0_suite.hpp"
#include "mmvlab/covering.hpp"
#include "mmvlab/energy.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/experiments.hpp"
#include "mmvlab/flow.hpp"
#include "mmvlab/functional.hpp"
#include "mmvlab/geometry.hpp"
#include "mmvlab/random.hpp"
#include "mmvlab/samplers.hpp"
#include "mmvlab/spectral.hpp"

namespace mmvlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<TreeEdge> star_edges(const std::vector<double>& legs) {
  std::vector<TreeEdge> edges;
  for (std::size_t i = 0; i < legs.size(); ++i) edges.push_back({0, i + 1, legs[i]});
  return edges;
}

SpacePtr make_space(const Config& c) {
  const auto kind = c.choice("space.kind", {"circle", "interval", "cube", "qcube", "star", "file"});
  if (kind == "circle") return share(sample_circle(c.count("space.n"), c.real("space.length", kTwoPi)));
  if (kind == "interval") return share(sample_interval(c.count("space.n"), c.real("space.length", 1.0)));
  if (kind == "cube") return share(sample_cube(c.counts("space.points"), c.reals("space.sides")));
  if (kind == "qcube") return share(sample_qcube(c.count("space.dim"), c.count("space.per_unit")));
  if (kind == "star") return share(sample_tree(star_edges(c.reals("space.legs")), c.count("space.interior", 0)));
  return share(space_from_json(read_json_file(c.text("space.path"))));
}

EnergyConfig make_energy(const Config& c, bool with_rho) {
  EnergyConfig e;
  e.p = c.real("energy.p", 2.0);
  if (with_rho) e.rho = c.real("energy.rho");
  e.h_mode = c.choice("energy.h", {"rho", "distance"}, "rho") == "rho" ? EnergyConfig::HMode::ConstantRho
                                                                      : EnergyConfig::HMode::PairwiseDistance;
  e.kappa = c.real("energy.kappa", 1.0);
  return e;
}

double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return std::sqrt((w.array() * v.array().square()).sum());
}

Eigen::VectorXd random_vector(std::size_t n, std::mt19937_64& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform(rng, -1.0, 1.0);
  return v;
}

Json summary_json(const std::vector<std::pair<std::string, double>>& summary) {
  Json j = Json::object();
  for (const auto& [k, v] : summary) j[k] = v;
  return j;
}

ExperimentOutput spectral_convergence(const Config& c) {
  const auto domain = make_space(c);
  const auto cfg = make_energy(c, false);
  const auto rho = c.reals("schedule.rho");
  const auto k = c.count("schedule.k");
  const auto reference = c.reals("reference.values", {});
  const auto res = eigen_convergence_experiment(domain, cfg, rho, k, reference);

  ExperimentOutput out;
  CsvTable eig;
  eig.columns = {"rho", "zero_multiplicity"};
  for (std::size_t m = 1; m <= k; ++m) eig.columns.push_back(fmt::format("lambda_{}", m));
  for (std::size_t j = 0; j < rho.size(); ++j) {
    std::vector<CsvCell> row{rho[j], static_cast<double>(res.zero_multiplicity[j])};
    for (std::size_t m = 0; m < k; ++m) row.emplace_back(res.eigenvalues(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)));
    eig.add(std::move(row));
  }
  CsvTable ext;
  ext.columns = {"mode", "extrapolated", "ratio_to_lambda_2", "reference"};
  for (std::size_t m = 0; m < k; ++m) {
    const double v = res.extrapolated(static_cast<Eigen::Index>(m));
    const double ratio = k >= 2 ? v / res.extrapolated(1) : std::numeric_limits<double>::quiet_NaN();
    const double ref = m < reference.size() ? reference[m] : std::numeric_limits<double>::quiet_NaN();
    ext.add({static_cast<double>(m + 1), v, ratio, ref});
  }
  out.tables["eigenvalues"] = std::move(eig);
  out.tables["extrapolated"] = std::move(ext);
  out.tables["summary"] = CsvTable::from_summary(res.report.summary);
  out.summary = summary_json(res.report.summary);
  return out;
}

ExperimentOutput resolvent_check(const Config& c, std::mt19937_64& rng) {
  const auto domain = make_space(c);
  const auto cfg = make_energy(c, true);
  const auto lambdas = c.reals("resolvent.lambda");
  const auto samples = c.count("resolvent.samples");
  ResolventOptions ro;
  ro.tol = c.real("resolvent.tol", ro.tol);

  const EnergyForm form(domain, cfg);
  const auto gen = assemble_generator(form);
  const auto e = ConvexFunctional::from_energy(form, TargetSpace::real());
  const Eigen::MatrixXd stiff = gen.stiffness();
  const Eigen::VectorXd& w = gen.weight;

  CsvTable t;
  t.columns = {"lambda", "sample", "defect", "sweeps", "residual"};
  double worst = 0.0;
  std::vector<Eigen::VectorXd> us;
  for (std::size_t s = 0; s < samples; ++s) us.push_back(random_vector(domain->size(), rng));
  for (double lambda : lambdas) {
    Eigen::MatrixXd m = lambda * stiff;
    m.diagonal() += w;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    for (std::size_t s = 0; s < samples; ++s) {
      const Eigen::VectorXd dense = ldlt.solve(w.cwiseProduct(us[s]));
      ResolventStats st;
      const auto j = resolvent(e, MappedFunction::real(domain, us[s]), lambda, ro, &st);
      const double d = weighted_norm(j.real_values() - dense, w);
      worst = std::max(worst, d);
      t.add({lambda, static_cast<double>(s), d, static_cast<double>(st.sweeps), st.residual});
    }
  }
  ExperimentOutput out;
  out.tables["resolvent"] = std::move(t);
  out.summary = {{"max_defect", worst}};
  return out;
}

ExperimentOutput semigroup_check(const Config& c, std::mt19937_64& rng) {
  const auto domain = make_space(c);
  const auto cfg = make_energy(c, true);
  const auto times = c.reals("semigroup.t");
  const auto samples = c.count("semigroup.samples");
  const double x0 = c.real("semigroup.real_start", 1.0);
  SemigroupOptions so;
  so.tol = c.real("semigroup.tol", so.tol);

  const EnergyForm form(domain, cfg);
  const auto spec = eigensolve(assemble_generator(form), domain->size());
  const auto e = ConvexFunctional::from_energy(form, TargetSpace::real());
  const Eigen::VectorXd& w = spec.weight;
  auto exact = [&](const Eigen::VectorXd& u, double t) {
    const Eigen::VectorXd coeff = spec.vectors.transpose() * w.cwiseProduct(u);
    return Eigen::VectorXd(spec.vectors * (coeff.array() * (-t * spec.values.array()).exp()).matrix());
  };

  CsvTable exp_t;
  exp_t.columns = {"t", "sample", "defect", "steps", "cauchy"};
  CsvTable law;
  law.columns = {"s", "t", "sample", "defect"};
  double worst_exp = 0.0;
  double worst_law = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto u = MappedFunction::real(domain, random_vector(domain->size(), rng));
    std::vector<MappedFunction> at;
    for (double t : times) {
      const auto r = semigroup(e, u, t, so);
      const double d = weighted_norm(r.value.real_values() - exact(u.real_values(), t), w);
      worst_exp = std::max(worst_exp, d);
      exp_t.add({t, static_cast<double>(s), d, static_cast<double>(r.steps), r.cauchy_defect});
      at.push_back(r.value);
    }
    for (std::size_t a = 0; a < times.size(); ++a) {
      for (std::size_t b = a; b < times.size(); ++b) {
        const auto sum = semigroup(e, u, times[a] + times[b], so).value;
        const auto composed = semigroup(e, at[b], times[a], so).value;
        const double d = lp_distance(sum, composed, 2.0);
        worst_law = std::max(worst_law, d);
        law.add({times[a], times[b], static_cast<double>(s), d});
      }
    }
  }

  // E(v) = v^2 on the real line: T_t x = e^{-t} x.
  const auto point = share(FiniteMetricMeasureSpace::trusted(Eigen::MatrixXd::Zero(1, 1),
                                                            Eigen::VectorXd::Ones(1), "point"));
  const ConvexFunctional square(point, TargetSpace::real(), 2.0, {},
                                {{0, TargetPoint::real(0.0), 1.0}});
  CsvTable line;
  line.columns = {"t", "x", "value", "exact", "defect", "steps"};
  double worst_line = 0.0;
  for (double t : times) {
    const auto r = semigroup(square, MappedFunction::real(point, Eigen::VectorXd::Constant(1, x0)), t, so);
    const double v = r.value.real_values()(0);
    const double ex = std::exp(-t) * x0;
    worst_line = std::max(worst_line, std::abs(v - ex));
    line.add({t, x0, v, ex, std::abs(v - ex), static_cast<double>(r.steps)});
  }
  ExperimentOutput out;
  out.tables["semigroup"] = std::move(exp_t);
  out.tables["semigroup_law"] = std::move(law);
  out.tables["real_line"] = std::move(line);
  out.summary = {{"max_expm_defect", worst_exp}, {"max_law_defect", worst_law}, {"max_real_line_defect", worst_line}};
  return out;
}

TargetPtr named_target(const std::string& name) {
  if (name == "real") return TargetSpace::real();
  if (name == "euclidean2") return TargetSpace::euclidean(2);
  if (name == "euclidean3") return TargetSpace::euclidean(3);
  auto tripod = std::make_shared<const MetricTree>(star_edges({1.0, 1.0, 1.0}));
  auto tree = std::make_shared<const MetricTree>(
      std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.5}, {0, 3, 2.0}, {3, 4, 0.7}, {3, 5, 1.1}});
  if (name == "tripod") return TargetSpace::tree(tripod);
  if (name == "tree") return TargetSpace::tree(tree);
  if (name == "product") return TargetSpace::product({TargetSpace::tree(tree), TargetSpace::real()});
  throw ConfigError("cat0.targets", 0,
                    fmt::format("unknown target '{}' (real, euclidean2, euclidean3, tripod, tree, product)", name));
}

ExperimentOutput cat0_suite(const Config& c, std::uint64_t seed) {
  const auto names = c.texts("cat0.targets");
  Cat0SuiteOptions o;
  o.triangles = c.count("cat0.triangles");
  o.pairs = c.count("cat0.pairs");
  o.lambdas = c.reals("cat0.lambda", o.lambdas);
  CsvTable t;
  t.columns = {"target", "triangles", "pairs", "comparison", "cn", "projection", "nonexpansive", "step_bound"};
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < names.size(); ++i) {
    o.seed = seed + i;
    const auto r = cat0_property_suite(named_target(names[i]), o);
    t.add({names[i], static_cast<double>(r.triangles), static_cast<double>(r.pairs), r.comparison, r.cn,
           r.projection, r.nonexpansive, r.step_bound});
    worst = std::min({worst, r.comparison, r.cn, r.projection, r.nonexpansive, r.step_bound});
  }
  ExperimentOutput out;
  out.tables["cat0"] = std::move(t);
  out.summary = {{"min_slack", worst}};
  return out;
}

ExperimentOutput covering(const Config& c, std::uint64_t seed) {
  const auto cs = c.reals("covering.c");
  const auto rs = c.reals("covering.r");
  const auto squares = c.counts("covering.square_points");
  const auto qcubes = c.counts("covering.qcube_per_unit");
  const auto budget = c.count("covering.budget");
  const auto instances = c.count("covering.fuzz_instances");
  const auto max_points = c.count("covering.fuzz_max_points");
  if (max_points < 2) throw ConfigError("covering.fuzz_max_points", c.line("covering.fuzz_max_points"), "fuzz_max_points must be >= 2");

  std::vector<std::pair<std::string, FiniteMetricMeasureSpace>> spaces;
  for (auto g : squares) spaces.emplace_back(fmt::format("square_{}x{}", g, g), sample_cube({g, g}, {1.0, 1.0}));
  for (auto q : qcubes) spaces.emplace_back(fmt::format("qcube2_per_unit_{}", q), sample_qcube(2, q));

  CsvTable t;
  t.columns = {"space", "points", "c", "r", "mode", "order", "bound", "volume_bound"};
  std::size_t exceed = 0;
  for (const auto& [name, x] : spaces) {
    CoveringOrderOptions o;
    o.seed = seed;
    o.budget = budget;
    const bool exhaustive = x.size() <= o.exhaustive_cap;
    o.mode = exhaustive ? CoveringOrderOptions::Mode::Exhaustive : CoveringOrderOptions::Mode::Randomized;
    for (double cc : cs) {
      for (double r : rs) {
        const auto k = covering_order(x, cc, r, o);
        const double bound = (cc + 1.0) * (cc + 1.0);
        if (static_cast<double>(k) > bound) ++exceed;
        t.add({name, static_cast<double>(x.size()), cc, r, exhaustive ? "exhaustive" : "randomized",
               static_cast<double>(k), bound, (2.0 * cc + 1.0) * (2.0 * cc + 1.0)});
      }
    }
  }

  CsvTable f;
  f.columns = {"instance", "points", "c", "r", "exhaustive", "randomized"};
  std::mt19937_64 rng(seed);
  std::size_t disagree = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto n = 2 + static_cast<std::size_t>(rng() % (max_points - 1));
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index a = 0; a < pts.rows(); ++a)
      for (Eigen::Index b = 0; b < 2; ++b) pts(a, b) = uniform01(rng);
    const auto x = FiniteMetricMeasureSpace::trusted(coordinate_metric(pts, "l2"),
                                                     Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
    const double cc = cs[i % cs.size()];
    const double r = uniform(rng, 0.1, 0.6);
    CoveringOrderOptions ex;
    CoveringOrderOptions rnd;
    rnd.mode = CoveringOrderOptions::Mode::Randomized;
    rnd.budget = budget;
    rnd.seed = seed + i;
    const auto a = covering_order(x, cc, r, ex);
    const auto b = covering_order(x, cc, r, rnd);
    if (a != b) ++disagree;
    f.add({static_cast<double>(i), static_cast<double>(n), cc, r, static_cast<double>(a), static_cast<double>(b)});
  }
  ExperimentOutput out;
  out.tables["covering"] = std::move(t);
  out.tables["covering_fuzz"] = std::move(f);
  out.summary = {{"bound_exceeded", exceed}, {"fuzz_disagreements", disagree}, {"fuzz_instances", instances}};
  return out;
}

Eigen::VectorXd circle_probe(const FiniteMetricMeasureSpace& x, const std::vector<std::size_t>& modes) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.size()));
  for (auto m : modes)
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v(i) += std::sin(static_cast<double>(m) * x.coords()(i, 0)) / static_cast<double>(m);
  return v;
}

ExperimentOutput poincare(const Config& c, std::uint64_t seed) {
  const auto kinds = c.texts("poincare.spaces");
  const auto n = c.count("poincare.n");
  const auto modes = c.counts("poincare.modes");
  const double cc = c.real("poincare.c", 1.0);
  const double R = c.real("poincare.R");
  auto cfg = make_energy(c, true);
  const auto refinements = c.counts("compactness.refinements");
  const auto radii = c.reals("compactness.radii");
  const double rho_factor = c.real("compactness.rho_factor");
  const auto budget = c.count("compactness.covering_budget", 50);

  CsvTable cert;
  cert.columns = {"space", "points", "rho", "R", "c", "C", "feasible", "infeasible_balls", "worst_r"};
  CsvTable bound;
  bound.columns = {"space", "map", "x", "r", "ratio", "theta", "bound"};
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (const auto& kind : kinds) {
    SpacePtr domain;
    if (kind == "circle") {
      domain = share(sample_circle(n, kTwoPi));
    } else if (kind == "interval") {
      domain = share(sample_interval(n, 1.0));
    } else {
      throw ConfigError("poincare.spaces", c.line("poincare.spaces"), fmt::format("unknown space '{}' (circle, interval)", kind));
    }
    std::vector<MappedFunction> maps;
    for (auto m : modes) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(domain->size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = domain->coords()(i, 0);
        v(i) = kind == "circle" ? std::sin(static_cast<double>(m) * x) : std::cos(static_cast<double>(m) * std::numbers::pi * x);
      }
      maps.push_back(MappedFunction::real(domain, v));
    }
    const EnergyForm form(domain, cfg);
    const auto pc = poincare_certificate(form, maps, cc, R);
    cert.add({kind, static_cast<double>(domain->size()), cfg.rho, R, cc, pc.C, pc.feasible ? "true" : "false",
              static_cast<double>(pc.infeasible_balls), pc.worst.r});
    const auto pb = poincare_bound_check(form, maps, R);
    worst_excess = std::max(worst_excess, pb.worst_excess);
    for (const auto& row : pb.rows) {
      bound.add({kind, static_cast<double>(row.map), static_cast<double>(row.x), row.r, row.ratio, row.theta, row.bound});
    }
  }

  // Step-map defects on circle refinements, with the certificate and the
  // covering order entering the claim bound C r^p K E.
  std::vector<MappedFunction> u_i;
  std::vector<EnergyForm> forms;
  std::vector<double> rho_i;
  std::vector<double> c_i;
  const double r_max = *std::max_element(radii.begin(), radii.end());
  for (auto m : refinements) {
    const auto domain = share(sample_circle(m, kTwoPi));
    auto fc = cfg;
    fc.rho = rho_factor * kTwoPi / static_cast<double>(m);
    rho_i.push_back(fc.rho);
    u_i.push_back(MappedFunction::real(domain, circle_probe(*domain, modes)));
    forms.emplace_back(domain, fc);
    c_i.push_back(poincare_certificate(forms.back(), {u_i.back()}, cc, std::max(r_max, 2.0 * fc.rho)).C);
  }
  const auto w = compactness_witness(u_i, forms, radii, cfg.p);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  CsvTable comp;
  comp.columns = {"radius", "i", "points", "rho", "in_scope", "defect", "tail_sup", "cauchy", "covering_order",
                  "certificate_C", "claim_bound"};
  for (std::size_t j = 0; j < radii.size(); ++j) {
    for (std::size_t i = 0; i < refinements.size(); ++i) {
      const bool in_scope = rho_i[i] < radii[j];
      double tail = nan;
      for (std::size_t k = i; k < refinements.size(); ++k) {
        if (rho_i[k] < radii[j]) tail = std::isnan(tail) ? w.defect(j, k) : std::max(tail, w.defect(j, k));
      }
      CoveringOrderOptions o;
      o.mode = CoveringOrderOptions::Mode::Randomized;
      o.budget = budget;
      o.seed = seed;
      const auto K = covering_order(*u_i[i].domain, cc, radii[j], o);
      const double claim = std::pow(c_i[i] * std::pow(radii[j], cfg.p) * static_cast<double>(K) * w.energies(static_cast<Eigen::Index>(i)),
                                    1.0 / cfg.p);
      comp.add({radii[j], static_cast<double>(i + 1), static_cast<double>(refinements[i]), rho_i[i],
                in_scope ? "true" : "false", in_scope ? w.defect(j, i) : nan, tail, w.cauchy(j, i),
                static_cast<double>(K), c_i[i], claim});
    }
  }
  ExperimentOutput out;
  out.tables["certificate"] = std::move(cert);
  out.tables["bound_check"] = std::move(bound);
  out.tables["compactness"] = std::move(comp);
  out.summary = {{"worst_bound_excess", worst_excess}, {"energy_growth", w.energy_growth}};
  return out;
}

ExperimentOutput two_point(const Config& c, std::uint64_t seed) {
  TwoPointParams p;
  p.alpha = c.real("two_point.alpha");
  p.beta = c.real("two_point.beta");
  const auto points = c.count("two_point.y_points");
  const double len = c.real("two_point.y_length", 1.0);
  if (points < 2) throw ConfigError("two_point.y_points", c.line("two_point.y_points"), "y_points must be >= 2");
  for (std::size_t i = 0; i < points; ++i) p.y_grid.push_back(len * static_cast<double>(i) / static_cast<double>(points - 1));
  p.deltas = c.reals("two_point.deltas");
  p.c = c.real("two_point.c");
  p.budget.iterations = c.count("two_point.iterations", p.budget.iterations);
  p.budget.candidate_cap = c.count("two_point.candidate_cap", p.budget.candidate_cap);
  p.budget.landmark_cap = c.count("two_point.landmark_cap", p.budget.landmark_cap);
  p.budget.seed = seed;
  const auto rep = two_point_sublevel_experiment(p);
  ExperimentOutput out;
  out.tables["two_point"] = CsvTable::from_report(rep);
  out.tables["summary"] = CsvTable::from_summary(rep.summary);
  out.summary = summary_json(rep.summary);
  return out;
}

ExperimentOutput tripod_flow(const Config& c) {
  const auto domain = make_space(c);
  const auto cfg = make_energy(c, true);
  const auto legs = c.reals("target.legs");
  auto tree = std::make_shared<const MetricTree>(star_edges(legs));
  const auto y = TargetSpace::tree(tree);
  const auto values = c.texts("flow.u0");
  if (values.size() != domain->size()) {
    throw ConfigError("flow.u0", c.line("flow.u0"), fmt::format("{} values for {} domain points", values.size(), domain->size()));
  }
  MappedFunction u0{domain, y, {}};
  for (const auto& v : values) {
    const auto colon = v.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(v);
      TreePoint tp{std::stoul(v.substr(0, colon)), std::stod(v.substr(colon + 1))};
      tree->check(tp);
      u0.values.emplace_back(tp);
    } catch (const std::exception&) {
      throw ConfigError("flow.u0", c.line("flow.u0"), fmt::format("line {}: bad tree point '{}' (edge:offset)", c.line("flow.u0"), v));
    }
  }
  FlowSchedule sched;
  sched.mode = c.choice("flow.mode", {"resolvent_path", "proximal_steps"}, "resolvent_path") == "resolvent_path"
                   ? FlowSchedule::Mode::ResolventPath
                   : FlowSchedule::Mode::ProximalSteps;
  sched.lambdas = c.reals("flow.lambda");
  ResolventOptions ro;
  ro.tol = c.real("flow.tol", ro.tol);
  const double grid_step = c.real("flow.grid_step");

  const auto e = ConvexFunctional::from_energy(EnergyForm(domain, cfg), y);
  const auto trace = harmonic_flow(e, u0, sched, ro);
  const auto& last = trace.iterates.back();

  // Brute-force Fréchet mean of the initial values on a grid of the legs.
  std::vector<double> w(domain->weight().data(), domain->weight().data() + domain->size());
  double best = std::numeric_limits<double>::infinity();
  TreePoint arg{};
  for (std::size_t edge = 0; edge < legs.size(); ++edge) {
    const auto steps = static_cast<std::size_t>(std::ceil(legs[edge] / grid_step));
    for (std::size_t s = 0; s <= steps; ++s) {
      const TreePoint q{edge, std::min(legs[edge], static_cast<double>(s) * grid_step)};
      const double f = frechet_objective(*y, TargetPoint(q), u0.values, w);
      if (f < best) {
        best = f;
        arg = q;
      }
    }
  }
  // The near-constant terminal map is represented by its own Fréchet mean.
  const auto terminal = frechet_mean(*y, last.values, w);
  const auto exact = frechet_mean(*y, u0.values, w);
  double spread = 0.0;
  for (std::size_t i = 0; i < domain->size(); ++i)
    for (std::size_t j = 0; j < i; ++j) spread = std::max(spread, y->distance(last.values[i], last.values[j]));
  CsvTable term;
  term.columns = {"point", "edge", "offset"};
  for (std::size_t i = 0; i < domain->size(); ++i) {
    term.add({static_cast<double>(i), static_cast<double>(last.values[i].tree_point().edge), last.values[i].tree_point().offset});
  }
  CsvTable tr;
  tr.columns = {"time", "energy", "residual", "sweeps"};
  for (std::size_t k = 0; k < trace.time.size(); ++k) {
    tr.add({trace.time[k], trace.energy[k], trace.residual[k], static_cast<double>(trace.sweeps[k])});
  }
  ExperimentOutput out;
  out.tables["flow"] = std::move(tr);
  out.tables["terminal"] = std::move(term);
  out.summary = {{"initial_energy", trace.energy.front()},
                 {"terminal_energy", trace.energy.back()},
                 {"energy_ratio", trace.energy.back() / trace.energy.front()},
                 {"terminal_spread", spread},
                 {"grid_mean_edge", arg.edge},
                 {"grid_mean_offset", arg.offset},
                 {"grid_step", grid_step},
                 {"terminal_edge", terminal.tree_point().edge},
                 {"terminal_offset", terminal.tree_point().offset},
                 {"terminal_to_grid_mean", y->distance(terminal, TargetPoint(arg))},
                 {"terminal_to_exact_mean", y->distance(terminal, exact)}};
  return out;
}

ExperimentOutput qcube(const Config& c) {
  const auto cfg = make_energy(c, false);
  const auto res = qcube_experiment(c.count("qcube.n_max"), c.count("qcube.per_unit"), cfg, c.reals("qcube.rho"),
                                    c.count("qcube.k"), c.real("qcube.cluster_gap", 0.08));
  CsvTable mult;
  mult.columns = {"n", "reference", "expected", "assigned"};
  CsvTable cl;
  cl.columns = {"n", "value", "multiplicity"};
  for (std::size_t n = 0; n < res.assigned.size(); ++n) {
    for (std::size_t k = 0; k < res.assigned[n].size(); ++k) {
      mult.add({static_cast<double>(n + 1), res.reference[n][k].first, static_cast<double>(res.reference[n][k].second),
                static_cast<double>(res.assigned[n][k].second)});
    }
    for (const auto& [v, m] : res.clusters[n]) cl.add({static_cast<double>(n + 1), v, static_cast<double>(m)});
  }
  ExperimentOutput out;
  out.tables["ratios"] = CsvTable::from_report(res.report);
  out.tables["multiplicities"] = std::move(mult);
  out.tables["clusters"] = std::move(cl);
  out.tables["summary"] = CsvTable::from_summary(res.report.summary);
  out.summary = summary_json(res.report.summary);
  return out;
}

ExperimentOutput mosco(const Config& c) {
  const auto refinements = c.counts("mosco.refinements");
  const auto limit_n = c.count("mosco.limit_points");
  const double len = c.real("mosco.length", kTwoPi);
  const auto cfg = make_energy(c, true);
  const auto lambdas = c.reals("mosco.lambda");
  const auto modes = c.counts("mosco.modes");
  const auto limit = share(sample_circle(limit_n, len));
  std::vector<MeasureApproximation> phi;
  for (auto n : refinements) phi.push_back(nearest_point_map(share(sample_circle(n, len)), limit));
  std::vector<Eigen::VectorXd> probes;
  for (auto m : modes) probes.push_back(circle_probe(*limit, {m}) * static_cast<double>(m));
  const auto rep = mosco_resolvent_experiment(phi, cfg, lambdas, probes);
  ExperimentOutput out;
  out.tables["mosco"] = CsvTable::from_report(rep);
  out.tables["summary"] = CsvTable::from_summary(rep.summary);
  out.summary = summary_json(rep.summary);
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"spectral_convergence", "resolvent_check", "semigroup_check",
                                            "cat0_suite", "covering", "poincare",
                                            "two_point_sublevel", "tripod_flow", "qcube",
                                            "mosco_resolvent"};
  return ids;
}

ExperimentOutput run_experiment(const Config& config) {
  const auto id = config.choice("experiment.id", experiment_ids());
  const auto seed = config.seed("experiment.seed");
  config.text("experiment.output", "");
  std::mt19937_64 rng(seed);
  ExperimentOutput out;
  try {
    if (id == "spectral_convergence") out = spectral_convergence(config);
    if (id == "resolvent_check") out = resolvent_check(config, rng);
    if (id == "semigroup_check") out = semigroup_check(config, rng);
    if (id == "cat0_suite") out = cat0_suite(config, seed);
    if (id == "covering") out = covering(config, seed);
    if (id == "poincare") out = poincare(config, seed);
    if (id == "two_point_sublevel") out = two_point(config, seed);
    if (id == "tripod_flow") out = tripod_flow(config);
    if (id == "qcube") out = qcube(config);
    if (id == "mosco_resolvent") out = mosco(config);
  } catch (const SolverError& e) {
    throw SolverError(fmt::format("{}: {}", id, e.what()), e.residual());
  }
  config.finish();
  out.id = id;
  out.summary["experiment"] = id;
  out.summary["seed"] = seed;
  return out;
}

RunResult write_outputs(const ExperimentOutput& out, const std::filesystem::path& directory, bool force,
                        const Json& params) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& [stem, table] : out.tables) files.emplace_back(stem + ".csv", table.csv());
  files.emplace_back("summary.json", out.summary.dump(2) + "\n");
  if (!force) {
    for (const auto& [name, _] : files) {
      if (std::filesystem::exists(directory / name)) {
        throw IoError(fmt::format("{} exists (use --force to overwrite)", (directory / name).string()));
      }
    }
    if (std::filesystem::exists(directory / "manifest.json")) {
      throw IoError(fmt::format("{} exists (use --force to overwrite)", (directory / "manifest.json").string()));
    }
  }
  RunResult res;
  res.directory = directory;
  Json manifest;
  manifest["experiment"] = out.id;
  manifest["params"] = params;
  manifest["files"] = Json::array();
  for (const auto& [name, content] : files) {
    write_file(directory / name, content, true);
    manifest["files"].push_back({{"name", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    res.files.push_back(name);
  }
  write_file(directory / "manifest.json", manifest.dump(2) + "\n", true);
  res.files.push_back("manifest.json");
  return res;
}

RunResult run_config(const std::filesystem::path& path, const RunOptions& options) {
  const auto config = Config::load(path);
  const auto out = run_experiment(config);
  std::filesystem::path dir;
  if (options.output) {
    dir = *options.output;
  } else if (config.has("experiment.output")) {
    dir = config.text("experiment.output");
  } else {
    throw ConfigError("experiment.output", 0, "no output directory: set [experiment] output or pass --out");
  }
  Json params = Json::object();
  for (const auto& [k, v] : config.fields()) params[k] = v;
  return write_outputs(out, dir, options.force, params);
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
      dynamic_cast<const InvalidSpace*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const SolverError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 4;
  return 1;
}

}  // namespace mmvlab
