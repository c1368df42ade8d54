#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmvlab/covering.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/gh.hpp"
#include "mmvlab/measure_approximation.hpp"
#include "mmvlab/samplers.hpp"
#include "mmvlab/union_metric.hpp"
#include "oracles.hpp"

using namespace mmvlab;

namespace {

FiniteMetricMeasureSpace line_space(std::vector<double> xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd pts(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) pts(i, 0) = xs[static_cast<std::size_t>(i)];
  return FiniteMetricMeasureSpace::validated(coordinate_metric(pts, "l2"), Eigen::VectorXd::Ones(n));
}

}  // namespace

TEST_CASE("validated rejects broken metrics and weights") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(FiniteMetricMeasureSpace::validated(d, Eigen::VectorXd::Ones(3)), InvalidSpace);

  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(FiniteMetricMeasureSpace::validated(asym, Eigen::VectorXd::Ones(2)), InvalidSpace);

  Eigen::MatrixXd ok(2, 2);
  ok << 0, 1, 1, 0;
  CHECK_THROWS_AS(FiniteMetricMeasureSpace::validated(ok, Eigen::Vector2d(1.0, 0.0)), InvalidSpace);
  CHECK_THROWS_AS(FiniteMetricMeasureSpace::validated(ok, Eigen::Vector3d(1.0, 1.0, 1.0)), InvalidSpace);

  Eigen::MatrixXd diag(2, 2);
  diag << 1, 1, 1, 0;
  CHECK_THROWS_AS(FiniteMetricMeasureSpace::validated(diag, Eigen::VectorXd::Ones(2)), InvalidSpace);
}

TEST_CASE("samplers") {
  const auto c = sample_circle(8, 2.0 * std::numbers::pi);
  CHECK(c.size() == 8);
  CHECK(c.mass() == doctest::Approx(1.0));
  CHECK(c.distance(0, 4) == doctest::Approx(std::numbers::pi));
  CHECK(c.distance(0, 7) == doctest::Approx(std::numbers::pi / 4));
  CHECK(c.diameter() == doctest::Approx(std::numbers::pi));

  const auto i = sample_interval(5, 1.0);
  CHECK(i.distance(0, 4) == doctest::Approx(1.0));
  CHECK(i.min_positive_distance() == doctest::Approx(0.25));

  const auto q = sample_qcube(2, 4);
  CHECK(q.size() == 5 * 3);
  CHECK(q.diameter() == doctest::Approx(std::sqrt(1.25)));

  const auto t = sample_tree({{0, 1, 1.0}, {0, 2, 2.0}}, 1);
  CHECK(t.size() == 5);
  CHECK(t.diameter() == doctest::Approx(3.0));
}

TEST_CASE("balls are open") {
  const auto x = line_space({0, 1, 2, 3});
  CHECK(x.ball(0, 1.0).size() == 1);
  CHECK(x.ball(0, 1.0 + 1e-12).size() == 2);
  CHECK(x.ball_mass(1, 1.5) == doctest::Approx(3.0));
}

TEST_CASE("gh bounds bracket the exact distance on tiny spaces") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto nx = 2 + static_cast<std::size_t>(rng() % 3);
    const auto ny = 2 + static_cast<std::size_t>(rng() % 3);
    const auto x = oracle::random_planar(nx, rng);
    const auto y = oracle::random_planar(ny, rng);
    const double exact = oracle::gh_exact(x, y);
    const double lo = gh_lower(x, y);
    const auto up = gh_upper(x, y, {.iterations = 400, .seed = static_cast<std::uint64_t>(trial)});
    CHECK(lo <= exact + 1e-12);
    CHECK(up.bound >= exact - 1e-12);
    CHECK(up.witness.is_surjective(nx, ny));
    CHECK(distortion(up.witness, x, y) / 2.0 == doctest::Approx(up.bound));
  }
}

TEST_CASE("gh of isometric copies is zero and the bound is monotone in the budget") {
  std::mt19937_64 rng(3);
  const auto x = oracle::random_planar(12, rng);
  std::vector<std::size_t> perm{5, 3, 0, 7, 1, 11, 2, 9, 4, 10, 6, 8};
  Eigen::MatrixXd d(12, 12);
  for (Eigen::Index i = 0; i < 12; ++i)
    for (Eigen::Index j = 0; j < 12; ++j) d(i, j) = x.distance(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  const auto y = FiniteMetricMeasureSpace::trusted(d, x.weight());
  CHECK(gh_upper(x, y, {.iterations = 3000}).bound == doctest::Approx(0.0));
  CHECK(gh_lower(x, y) == doctest::Approx(0.0));

  const auto z = oracle::random_planar(9, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it : {0, 10, 100, 1000}) {
    const double b = gh_upper(x, z, {.iterations = it, .seed = 4}).bound;
    CHECK(b <= prev + 1e-15);
    prev = b;
  }
}

TEST_CASE("gh lower bound sees the diameter gap") {
  const auto x = line_space({0, 1});
  const auto y = line_space({0, 3});
  CHECK(gh_lower(x, y) >= 1.0 - 1e-12);
  CHECK(oracle::gh_exact(x, y) == doctest::Approx(1.0));
}

TEST_CASE("distortion and eps-approximations") {
  const auto x = line_space({0, 1, 2});
  const auto y = line_space({0, 1.1, 2.3});
  const std::vector<std::size_t> f{0, 1, 2};
  CHECK(distortion(std::span<const std::size_t>(f), x, y) == doctest::Approx(0.3));
  CHECK(is_eps_approximation(f, x, y, 0.31));
  CHECK_FALSE(is_eps_approximation(f, x, y, 0.25));
  const std::vector<std::size_t> g{0, 0, 0};
  CHECK_FALSE(is_eps_approximation(g, x, y, 1.0));
}

TEST_CASE("hausdorff distance between subsets") {
  const auto z = line_space({0, 1, 2, 5});
  const std::vector<std::size_t> a{0, 1};
  const std::vector<std::size_t> b{2, 3};
  CHECK(hausdorff_distance(z, a, b) == doctest::Approx(4.0));
  CHECK(hausdorff_distance(z, a, a) == doctest::Approx(0.0));
}

TEST_CASE("maximal nets are separated and maximal") {
  std::mt19937_64 rng(5);
  const auto x = oracle::random_planar(60, rng);
  for (double r : {0.05, 0.2, 0.5}) {
    for (std::optional<std::uint64_t> seed : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{7}}) {
      const auto net = maximal_r_discrete_net(x, r, seed);
      for (std::size_t i = 0; i < net.size(); ++i)
        for (std::size_t j = i + 1; j < net.size(); ++j) CHECK(x.distance(net[i], net[j]) >= r);
      for (std::size_t p = 0; p < x.size(); ++p) {
        bool covered = false;
        for (auto s : net) covered = covered || x.distance(p, s) < r;
        CHECK(covered);
      }
    }
  }
  CHECK_THROWS_AS(maximal_r_discrete_net(x, 0.0), InvalidArgument);
}

TEST_CASE("exhaustive covering order matches subset enumeration") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = 2 + static_cast<std::size_t>(rng() % 9);
    const auto x = oracle::random_planar(n, rng);
    const double c = 1.0 + static_cast<double>(rng() % 3);
    const double r = uniform(rng, 0.05, 0.7);
    CHECK(covering_order(x, c, r) == oracle::covering_exact(x, c, r));
    CoveringOrderOptions o;
    o.mode = CoveringOrderOptions::Mode::Randomized;
    o.budget = 50;
    CHECK(covering_order(x, c, r, o) <= oracle::covering_exact(x, c, r));
  }
}

TEST_CASE("covering order of a line segment") {
  // Points 0, 1, ..., 6 with r = 1 and c = 2: a point sees the open ball of
  // radius 2, i.e. three net points.
  const auto x = line_space({0, 1, 2, 3, 4, 5, 6});
  CHECK(covering_order(x, 2.0, 1.0) == 3);
  CHECK(covering_order(x, 1.0, 1.0) == 1);
  CHECK_THROWS_AS(covering_order(x, 0.5, 1.0), InvalidArgument);
  CoveringOrderOptions tight;
  tight.exhaustive_cap = 4;
  CHECK_THROWS_AS(covering_order(x, 1.0, 1.0, tight), InvalidArgument);
}

TEST_CASE("projection onto a subset and the Kuratowski embedding") {
  std::mt19937_64 rng(23);
  const auto x = oracle::random_planar(15, rng);
  const std::vector<std::size_t> sub{3, 9, 12};
  const auto proj = project_onto_subset(x, sub);
  for (std::size_t p = 0; p < x.size(); ++p)
    for (auto s : sub) CHECK(x.distance(p, proj[p]) <= x.distance(p, s));
  const auto k = kuratowski_embed(x, 0);
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.rows(); ++j)
      CHECK((k.row(i) - k.row(j)).cwiseAbs().maxCoeff() ==
            doctest::Approx(x.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
}

TEST_CASE("union metric is a metric extending the blocks") {
  const auto limit = share(sample_circle(16, 2.0 * std::numbers::pi));
  const auto b1 = share(sample_circle(8, 2.0 * std::numbers::pi));
  const auto b2 = share(sample_circle(4, 2.0 * std::numbers::pi));
  LandmarkTable t1{{{0, 0}, {2, 4}, {4, 8}, {6, 12}}, 1};
  LandmarkTable t2{{{0, 0}, {1, 4}, {2, 8}, {3, 12}}, 2};
  const auto u = UnionMetric::build({b1, b2}, limit, {t1, t2});
  CHECK(u.size() == 28);
  CHECK_NOTHROW(FiniteMetricMeasureSpace::validated(u.dist(), u.as_space().weight()));
  CHECK(u.dist()(static_cast<Eigen::Index>(u.global_index(0, 1)), static_cast<Eigen::Index>(u.global_index(0, 3))) ==
        doctest::Approx(b1->distance(1, 3)));
  CHECK(u.dist()(static_cast<Eigen::Index>(u.global_index(1, 0)), static_cast<Eigen::Index>(u.global_index(2, 0))) ==
        doctest::Approx(0.5));

  LandmarkTable bad{{{0, 0}, {1, 8}}, 4};
  CHECK_THROWS_AS(UnionMetric::build({b1}, limit, {bad}), InvalidArgument);
}

TEST_CASE("nearest point maps push the measure forward") {
  const auto src = share(sample_circle(64, 2.0 * std::numbers::pi));
  const auto dst = share(sample_circle(16, 2.0 * std::numbers::pi));
  const auto phi = nearest_point_map(src, dst);
  CHECK(phi.domain().size() == 64);
  CHECK(phi.pushforward_weight().sum() == doctest::Approx(1.0));
  for (Eigen::Index i = 0; i < 16; ++i) CHECK(phi.pushforward_weight()(i) == doctest::Approx(1.0 / 16.0));
  const auto id = MeasureApproximation::identity(dst);
  for (std::size_t x = 0; x < 16; ++x) CHECK(*id(x) == x);
  const auto half = phi.restricted({0, 1, 2, 3});
  CHECK(half.domain().size() == 4);
  CHECK(half.pushforward_weight().sum() == doctest::Approx(4.0 / 64.0));
}
