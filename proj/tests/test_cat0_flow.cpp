#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmvlab/cat0_suite.hpp"
#include "mmvlab/energy.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/flow.hpp"
#include "mmvlab/functional.hpp"
#include "mmvlab/geometry.hpp"
#include "mmvlab/samplers.hpp"
#include "oracles.hpp"

using namespace mmvlab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::shared_ptr<const MetricTree> tripod() {
  return std::make_shared<const MetricTree>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

std::shared_ptr<const MetricTree> branching_tree() {
  return std::make_shared<const MetricTree>(
      std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.5}, {0, 3, 2.0}, {3, 4, 0.7}, {3, 5, 1.1}});
}

std::vector<TargetPtr> geodesic_targets() {
  return {TargetSpace::real(), TargetSpace::euclidean(2), TargetSpace::tree(tripod()),
          TargetSpace::tree(branching_tree()),
          TargetSpace::product({TargetSpace::tree(branching_tree()), TargetSpace::real()}),
          TargetSpace::product({TargetSpace::product({TargetSpace::tree(tripod()), TargetSpace::real()}),
                                TargetSpace::euclidean(2)})};
}

ConvexFunctional circle_energy(std::size_t n, double rho, TargetPtr y) {
  EnergyConfig c;
  c.rho = rho;
  return ConvexFunctional::from_energy(EnergyForm(share(sample_circle(n, kTwoPi)), c), std::move(y));
}

MappedFunction random_map(const ConvexFunctional& e, const TargetSpace& y, std::mt19937_64& rng) {
  MappedFunction u{e.domain(), e.target(), {}};
  for (std::size_t i = 0; i < e.domain()->size(); ++i) u.values.push_back(random_target_point(y, rng, 1.5));
  return u;
}

}  // namespace

TEST_CASE("metric tree distances and geodesics") {
  const auto t = branching_tree();
  CHECK(t->vertex_count() == 6);
  CHECK(t->total_length() == doctest::Approx(6.3));
  CHECK(t->vertex_distance(1, 4) == doctest::Approx(3.7));
  const TreePoint a{0, 0.5};
  const TreePoint b{4, 0.3};
  CHECK(t->distance(a, b) == doctest::Approx(0.5 + 2.0 + 0.3));
  for (double s : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const auto g = t->geodesic(a, b, s);
    CHECK(t->distance(a, g) == doctest::Approx(s * t->distance(a, b)));
    CHECK(t->distance(g, b) == doctest::Approx((1 - s) * t->distance(a, b)));
  }
  CHECK_THROWS_AS(MetricTree({{0, 1, 1.0}, {1, 0, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(MetricTree({{0, 1, -1.0}}), InvalidArgument);
  CHECK_THROWS_AS(MetricTree({{0, 1, 1.0}, {2, 3, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(t->check(TreePoint{0, 1.5}), InvalidArgument);
}

TEST_CASE("product targets combine factor distances in l2") {
  const auto y = TargetSpace::product({TargetSpace::tree(tripod()), TargetSpace::real()});
  const TargetPoint p(std::vector<TargetPoint>{TargetPoint(TreePoint{0, 1.0}), TargetPoint::real(0.0)});
  const TargetPoint q(std::vector<TargetPoint>{TargetPoint(TreePoint{1, 1.0}), TargetPoint::real(1.5)});
  CHECK(y->distance(p, q) == doctest::Approx(2.5));
  CHECK_THROWS_AS(y->check(TargetPoint::real(1.0)), InvalidArgument);
}

TEST_CASE("geodesic projection is exact against a parameter grid") {
  std::mt19937_64 rng(31);
  for (const auto& y : geodesic_targets()) {
    for (int trial = 0; trial < 40; ++trial) {
      const auto a = random_target_point(*y, rng);
      const auto b = random_target_point(*y, rng);
      const auto x = random_target_point(*y, rng);
      const auto pr = project_to_geodesic(*y, x, a, b);
      const double d = y->distance(x, pr.point);
      CHECK(y->distance(pr.point, geodesic(*y, a, b, pr.t)) <= 1e-9);
      CHECK(d <= oracle::segment_distance_grid(*y, x, a, b) + 1e-9);
    }
  }
}

TEST_CASE("frechet mean beats a grid on trees and matches the average on R^n") {
  std::mt19937_64 rng(37);
  const auto y = TargetSpace::tree(branching_tree());
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<TargetPoint> pts;
    std::vector<double> w;
    for (int k = 0; k < 7; ++k) {
      pts.push_back(random_target_point(*y, rng));
      w.push_back(uniform(rng, 0.1, 1.0));
    }
    const auto m = frechet_mean(*y, pts, w);
    const auto grid = oracle::tree_grid_mean(*y, pts, w, 1e-3);
    CHECK(frechet_objective(*y, m, pts, w) <= frechet_objective(*y, TargetPoint(grid), pts, w) + 1e-12);
    CHECK(y->distance(m, TargetPoint(grid)) <= 2e-3);
    const auto ind = inductive_mean(*y, pts, w, 400);
    CHECK(y->distance(ind, m) <= 0.05);
  }
  const auto e = TargetSpace::euclidean(3);
  std::vector<TargetPoint> pts{TargetPoint(Eigen::VectorXd(Eigen::Vector3d(1, 0, 0))),
                               TargetPoint(Eigen::VectorXd(Eigen::Vector3d(0, 2, 0))),
                               TargetPoint(Eigen::VectorXd(Eigen::Vector3d(0, 0, 3)))};
  std::vector<double> w{1.0, 1.0, 2.0};
  const auto m = frechet_mean(*e, pts, w);
  CHECK((m.coords() - Eigen::Vector3d(0.25, 0.5, 1.5)).norm() <= 1e-14);
}

TEST_CASE("comparison inequalities hold on CAT(0) targets") {
  std::mt19937_64 rng(41);
  for (const auto& y : geodesic_targets()) {
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_target_point(*y, rng);
      const auto b = random_target_point(*y, rng);
      const auto c = random_target_point(*y, rng);
      const double s = uniform01(rng);
      const double t = uniform01(rng);
      worst = std::min({worst, comparison_slack(*y, a, b, c, t), comparison_slack(*y, a, b, c, s, t)});
    }
    CHECK(worst >= -1e-9);
  }
}

TEST_CASE("cat0 property suite") {
  Cat0SuiteOptions o;
  o.triangles = 200;
  o.pairs = 60;
  for (const auto& y : geodesic_targets()) {
    const auto r = cat0_property_suite(y, o);
    CHECK(r.triangles == 200);
    CHECK(r.comparison >= -1e-9);
    CHECK(r.cn >= -1e-9);
    CHECK(r.projection >= -1e-9);
    CHECK(r.nonexpansive >= -1e-9);
    CHECK(r.step_bound >= -1e-9);
  }
  const auto finite = TargetSpace::finite(share(sample_circle(5, kTwoPi)));
  CHECK_THROWS_AS(cat0_property_suite(finite, o), InvalidArgument);
}

TEST_CASE("euclidean resolvent agrees with the dense linear solve") {
  std::mt19937_64 rng(43);
  EnergyConfig c;
  c.rho = 0.7;
  const EnergyForm form(share(sample_circle(24, kTwoPi)), c);
  const auto e = ConvexFunctional::from_energy(form, TargetSpace::real());
  const Eigen::MatrixXd l = oracle::stiffness_by_polarization(form);
  const Eigen::VectorXd& w = form.domain()->weight();
  for (double lambda : {0.01, 1.0, 50.0}) {
    Eigen::VectorXd u(24);
    for (Eigen::Index i = 0; i < 24; ++i) u(i) = uniform(rng, -2.0, 2.0);
    ResolventStats st;
    const auto j = resolvent(e, MappedFunction::real(form.domain(), u), lambda, {}, &st);
    const Eigen::VectorXd dense = oracle::dense_resolvent(l, w, u, lambda);
    CHECK(std::sqrt((j.real_values() - dense).cwiseAbs2().dot(w)) <= 1e-10);
    CHECK(st.sweeps > 0);
    const double my = moreau_yosida(e, MappedFunction::real(form.domain(), u), lambda);
    CHECK(my == doctest::Approx(lambda * dense.dot(l * dense) + (u - dense).cwiseAbs2().dot(w)));
  }
}

TEST_CASE("resolvent of a vector-valued map splits into coordinates") {
  std::mt19937_64 rng(44);
  const auto e2 = circle_energy(12, 1.2, TargetSpace::euclidean(2));
  const auto e1 = circle_energy(12, 1.2, TargetSpace::real());
  const auto u = random_map(e2, *e2.target(), rng);
  const auto j = resolvent(e2, u, 0.8);
  for (Eigen::Index k = 0; k < 2; ++k) {
    Eigen::VectorXd comp(12);
    for (std::size_t i = 0; i < 12; ++i) comp(static_cast<Eigen::Index>(i)) = u.values[i].coords()(k);
    const auto jk = resolvent(e1, MappedFunction::real(e1.domain(), comp), 0.8);
    for (std::size_t i = 0; i < 12; ++i) CHECK(j.values[i].coords()(k) == doctest::Approx(jk.real_values()(static_cast<Eigen::Index>(i))));
  }
}

TEST_CASE("resolvent budget exhaustion raises SolverError") {
  const auto e = circle_energy(16, 1.0, TargetSpace::tree(tripod()));
  std::mt19937_64 rng(45);
  const auto u = random_map(e, *e.target(), rng);
  ResolventOptions o;
  o.max_sweeps = 2;
  CHECK_THROWS_AS(resolvent(e, u, 10.0, o), SolverError);
}

TEST_CASE("tree resolvent: nonexpansive, step bound, energy decrease") {
  std::mt19937_64 rng(47);
  for (double p : {2.0, 1.5}) {
    EnergyConfig c;
    c.rho = 1.2;
    c.p = p;
    const auto y = TargetSpace::tree(branching_tree());
    const auto e = ConvexFunctional::from_energy(EnergyForm(share(sample_circle(8, kTwoPi)), c), y);
    for (int trial = 0; trial < 6; ++trial) {
      const auto u = random_map(e, *y, rng);
      const auto v = random_map(e, *y, rng);
      for (double lambda : {0.1, 1.0}) {
        const auto ju = resolvent(e, u, lambda);
        const auto jv = resolvent(e, v, lambda);
        CHECK(lp_distance(ju, jv, 2.0) <= lp_distance(u, v, 2.0) + 1e-9);
        const double step = lp_distance(ju, u, 2.0);
        CHECK(step * step <= lambda * (e(u) - e.lower_bound()) + 1e-9);
        CHECK(e(ju) <= e(u) + 1e-12);
      }
    }
  }
}

TEST_CASE("semigroup matches the matrix exponential and the real-line decay") {
  EnergyConfig c;
  c.rho = 1.0;
  const EnergyForm form(share(sample_circle(10, kTwoPi)), c);
  const auto e = ConvexFunctional::from_energy(form, TargetSpace::real());
  const Eigen::MatrixXd l = oracle::stiffness_by_polarization(form);
  std::mt19937_64 rng(53);
  Eigen::VectorXd u(10);
  for (Eigen::Index i = 0; i < 10; ++i) u(i) = uniform(rng, -1.0, 1.0);
  for (double t : {0.3, 1.0}) {
    const auto r = semigroup(e, MappedFunction::real(form.domain(), u), t);
    const Eigen::VectorXd exact = oracle::dense_heat(l, form.domain()->weight(), u, t);
    CHECK(std::sqrt((r.value.real_values() - exact).cwiseAbs2().dot(form.domain()->weight())) <= 1e-6);
    CHECK(r.cauchy_defect <= 2.5e-7);
  }

  const auto point = share(FiniteMetricMeasureSpace::trusted(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1)));
  const ConvexFunctional square(point, TargetSpace::real(), 2.0, {}, {{0, TargetPoint::real(0.0), 1.0}});
  const auto r = semigroup(square, MappedFunction::real(point, Eigen::VectorXd::Constant(1, 2.0)), 0.7);
  CHECK(std::abs(r.value.real_values()(0) - 2.0 * std::exp(-0.7)) <= 1e-6);
}

TEST_CASE("resolvent identities on a tree target") {
  const auto y = TargetSpace::tree(tripod());
  const auto e = circle_energy(6, 1.5, y);
  std::mt19937_64 rng(59);
  std::vector<MappedFunction> samples;
  for (int k = 0; k < 3; ++k) samples.push_back(random_map(e, *y, rng));
  const auto rep = resolvent_identities_check(e, samples, {0.1, 1.0}, {{0.2, 0.3}});
  CHECK(rep.nonexpansive_slack >= -1e-9);
  CHECK(rep.step_bound_slack >= -1e-9);
  CHECK(rep.monotonicity_slack >= -1e-9);
  CHECK(rep.semigroup_defect <= 1e-5);
  CHECK(rep.cases > 0);
}

TEST_CASE("harmonic flow into a tripod contracts to the Fréchet mean") {
  const auto y = TargetSpace::tree(tripod());
  const auto e = circle_energy(6, 1.5, y);
  MappedFunction u0{e.domain(), y,
                    {TreePoint{0, 0.4}, TreePoint{0, 0.5}, TreePoint{1, 0.6}, TreePoint{1, 0.9}, TreePoint{2, 0.2},
                     TreePoint{2, 0.3}}};
  FlowSchedule path;
  path.lambdas = {1.0, 10.0, 100.0, 1000.0, 10000.0};
  const auto trace = harmonic_flow(e, u0, path);
  REQUIRE(trace.energy.size() == 6);
  for (std::size_t k = 1; k < trace.energy.size(); ++k) CHECK(trace.energy[k] <= trace.energy[k - 1] + 1e-15);
  CHECK(trace.energy.back() <= 1e-6 * trace.energy.front());
  std::vector<double> w(6, 1.0 / 6.0);
  const auto terminal = frechet_mean(*y, trace.iterates.back().values, w);
  const auto exact = frechet_mean(*y, u0.values, w);
  CHECK(y->distance(terminal, exact) <= 1e-6);

  FlowSchedule steps;
  steps.mode = FlowSchedule::Mode::ProximalSteps;
  steps.lambdas = std::vector<double>(20, 1.0);
  const auto prox = harmonic_flow(e, u0, steps);
  for (std::size_t k = 1; k < prox.energy.size(); ++k) CHECK(prox.energy[k] <= prox.energy[k - 1] + 1e-15);
  CHECK(prox.csv().rfind("time,energy,residual,sweeps\n", 0) == 0);
}
