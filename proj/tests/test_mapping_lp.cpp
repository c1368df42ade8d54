#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mmvlab/error.hpp"
#include "mmvlab/mapping.hpp"
#include "mmvlab/samplers.hpp"

using namespace mmvlab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd sine(const FiniteMetricMeasureSpace& x, double k) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::sin(k * x.coords()(i, 0));
  return v;
}

}  // namespace

TEST_CASE("lp distance between real maps") {
  const auto m = share(sample_interval(4, 3.0));
  const auto u = MappedFunction::real(m, Eigen::Vector4d(0, 0, 0, 0));
  const auto v = MappedFunction::real(m, Eigen::Vector4d(1, -1, 2, 0));
  // weights 1/4 each
  CHECK(lp_distance(u, v, 2.0) == doctest::Approx(std::sqrt(6.0 / 4.0)));
  CHECK(lp_distance(u, v, 1.0) == doctest::Approx(1.0));
  CHECK(lp_distance(v, v, 2.0) == 0.0);
  CHECK_THROWS_AS(lp_distance(u, v, 0.5), InvalidArgument);
  const auto same = MappedFunction::real(share(sample_interval(4, 3.0)), Eigen::Vector4d::Zero());
  CHECK(lp_distance(same, v, 2.0) == doctest::Approx(std::sqrt(6.0 / 4.0)));
  const auto other = MappedFunction::real(share(sample_interval(4, 6.0)), Eigen::Vector4d::Zero());
  CHECK_THROWS_AS(lp_distance(u, other, 2.0), InvalidArgument);
}

TEST_CASE("lp distance is a metric on tree-valued maps") {
  auto tree = std::make_shared<const MetricTree>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  const auto y = TargetSpace::tree(tree);
  const auto m = share(sample_circle(3, kTwoPi));
  MappedFunction a{m, y, {TreePoint{0, 0.5}, TreePoint{1, 0.5}, TreePoint{2, 0.5}}};
  MappedFunction b{m, y, {TreePoint{1, 0.5}, TreePoint{2, 0.5}, TreePoint{0, 0.5}}};
  MappedFunction c = MappedFunction::constant(m, y, TreePoint{0, 0.0});
  CHECK(lp_distance(a, b, 2.0) == doctest::Approx(1.0));
  CHECK(lp_distance(a, c, 2.0) == doctest::Approx(0.5));
  CHECK(lp_distance(a, b, 2.0) <= lp_distance(a, c, 2.0) + lp_distance(c, b, 2.0) + 1e-15);
}

TEST_CASE("pushforward composes with the measure approximation") {
  const auto limit = share(sample_circle(16, kTwoPi));
  const auto fine = share(sample_circle(64, kTwoPi));
  const auto phi = nearest_point_map(fine, limit);
  const auto u = MappedFunction::real(limit, sine(*limit, 1.0));
  const auto pu = pushforward(u, phi);
  REQUIRE(pu.values.size() == 64);
  for (std::size_t x = 0; x < 64; ++x) CHECK(pu.values[x].coords()(0) == u.values[*phi(x)].coords()(0));

  const auto partial = phi.restricted({0, 1});
  const auto fill = TargetPoint::real(7.0);
  const auto pp = pushforward(u, partial, &fill);
  CHECK(pp.values[5].coords()(0) == 7.0);
  const auto pz = pushforward(u, partial);
  CHECK(pz.values[5].coords()(0) == 0.0);
}

TEST_CASE("measure approximation check vanishes for equal pushforward weights") {
  const auto limit = share(sample_circle(16, kTwoPi));
  const auto fine = share(sample_circle(64, kTwoPi));
  const auto phi = nearest_point_map(fine, limit);
  std::vector<TestFunction> dict{
      [](const FiniteMetricMeasureSpace& s, std::size_t y) { return std::cos(s.coords()(static_cast<Eigen::Index>(y), 0)); },
      [](const FiniteMetricMeasureSpace&, std::size_t) { return 1.0; },
  };
  CHECK(check_measure_approximation(phi, dict) == doctest::Approx(0.0).epsilon(1e-12));
  const auto half = phi.restricted(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(check_measure_approximation(half, dict) > 0.5);
  CHECK_THROWS_AS(check_measure_approximation(phi, {}), InvalidArgument);
}

TEST_CASE("smoothing is the identity below the mesh and averages above it") {
  const auto m = share(sample_circle(32, kTwoPi));
  const auto u = MappedFunction::real(m, sine(*m, 1.0));
  const auto same = smooth(u, 0.5 * m->min_positive_distance());
  CHECK(lp_distance(same, u, 2.0) == doctest::Approx(0.0));
  const auto avg = smooth(u, 1.5 * m->min_positive_distance());
  const double h = m->min_positive_distance();
  const double factor = (1.0 + 2.0 * std::cos(h)) / 3.0;
  for (std::size_t x = 0; x < 32; ++x)
    CHECK(avg.values[x].coords()(0) == doctest::Approx(factor * u.values[x].coords()(0)).epsilon(1e-12));
  CHECK_THROWS_AS(smooth(u, 0.0), InvalidArgument);
}

TEST_CASE("lp convergence table decays along refinements") {
  const auto limit = share(sample_circle(128, kTwoPi));
  const auto u = MappedFunction::real(limit, sine(*limit, 2.0));
  std::vector<MappedFunction> u_i;
  std::vector<MeasureApproximation> phi_i;
  for (std::size_t n : {16, 32, 64, 128}) {
    const auto m = share(sample_circle(n, kTwoPi));
    u_i.push_back(MappedFunction::real(m, sine(*m, 2.0)));
    phi_i.push_back(nearest_point_map(m, limit));
  }
  const auto t = lp_convergence_table(u_i, phi_i, u, 2.0, {0.4, 0.2, 0.01});
  CHECK(t.table.rows() == 3);
  CHECK(t.table.cols() == 4);
  CHECK(t.table(2, 3) == doctest::Approx(0.0));
  CHECK(t.tail_sup[0] >= t.tail_sup[1]);
  CHECK(t.diagnostic <= t.tail_sup[1] + 1e-15);
}

TEST_CASE("asymptotic relation traces") {
  const auto x = sample_circle(8, kTwoPi);
  std::vector<SpacePtr> x_i;
  std::vector<std::vector<std::size_t>> f_i;
  for (std::size_t k : {1, 2, 4}) {
    x_i.push_back(share(sample_circle(8 * k, kTwoPi)));
    std::vector<std::size_t> f(8);
    for (std::size_t j = 0; j < 8; ++j) f[j] = j * k;
    f_i.push_back(f);
  }
  const auto rep = asymptotic_relation_diagnostics(x, x_i, f_i, {{0, 1}, {0, 4}, {2, 7}});
  CHECK(rep.final_max == doctest::Approx(0.0));
  for (bool b : rep.blowup) CHECK_FALSE(b);
}
