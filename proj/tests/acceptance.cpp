// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mmvlab/config.hpp"
#include "mmvlab/io.hpp"
#include "mmvlab/runner.hpp"

using namespace mmvlab;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kSpectralRelTol = 0.05;
constexpr double kSpectralSeconds = 60.0;
constexpr double kResolventTol = 1e-8;
constexpr double kResolventSeconds = 5.0;
constexpr double kSemigroupTol = 1e-6;
constexpr double kCat0Tol = 1e-9;
constexpr std::size_t kTriangles = 1000;
constexpr std::size_t kPairs = 500;
constexpr std::size_t kFuzzMin = 100;
constexpr std::size_t kFuzzMaxPoints = 8;
constexpr double kPoincareSeconds = 120.0;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kTwoPointFactor = 0.1;
constexpr double kTwoPointSeconds = 30.0;
constexpr double kTripodEnergyRatio = 1e-8;
constexpr double kTripodSeconds = 30.0;
constexpr double kQcubeRelTol = 0.05;
constexpr double kQcubeSeconds = 120.0;

const char* kSpectral = R"(
[experiment]
id = spectral_convergence
seed = 1
[space]
kind = circle
n = 512
length = 6.283185307179586
[energy]
p = 2
h = rho
[schedule]
rho = 0.4, 0.3, 0.2, 0.1
k = 5
[reference]
values = 0, 0.3333333333333333, 0.3333333333333333, 1.3333333333333333, 1.3333333333333333
)";

const char* kResolvent = R"(
[experiment]
id = resolvent_check
seed = 2
[space]
kind = circle
n = 32
[energy]
rho = 0.5
[resolvent]
lambda = 0.1, 1, 10
samples = 20
)";

const char* kSemigroup = R"(
[experiment]
id = semigroup_check
seed = 3
[space]
kind = circle
n = 16
[energy]
rho = 0.9
[semigroup]
t = 0.5, 1, 2
samples = 1
real_start = 1.5
)";

const char* kCat0 = R"(
[experiment]
id = cat0_suite
seed = 4
[cat0]
targets = real, euclidean2, euclidean3, tripod, tree, product
triangles = 1000
pairs = 500
lambda = 0.1, 1, 10
)";

const char* kCovering = R"(
[experiment]
id = covering
seed = 5
[covering]
c = 1, 2, 3
r = 0.2, 0.25, 0.34, 0.5
square_points = 4, 9
qcube_per_unit = 4, 8
budget = 200
fuzz_instances = 120
fuzz_max_points = 8
)";

const char* kPoincare = R"(
[experiment]
id = poincare
seed = 6
[energy]
rho = 0.3
[poincare]
spaces = circle, interval
n = 64
modes = 1, 2, 3
c = 1
R = 1.0
[compactness]
refinements = 64, 128, 256, 512
radii = 0.7853981633974483, 0.39269908169872414, 0.19634954084936207, 0.09817477042468103
rho_factor = 4
covering_budget = 50
)";

const char* kTwoPoint = R"(
[experiment]
id = two_point_sublevel
seed = 7
[two_point]
alpha = 1
beta = 2
y_points = 17
y_length = 1
deltas = 1, 0.5, 0.25, 0.125
c = 0.15
iterations = 2000
)";

const char* kTripod = R"(
[experiment]
id = tripod_flow
seed = 8
[space]
kind = circle
n = 9
[energy]
rho = 1.5
[target]
legs = 1, 1, 1
[flow]
u0 = 0:0.2, 0:0.3, 0:0.4, 1:0.8, 1:0.9, 1:1.0, 2:0.1, 2:0.2, 2:0.3
mode = resolvent_path
lambda = 1, 10, 100, 1000, 10000, 100000
grid_step = 1e-5
)";

const char* kQcube2 = R"(
[experiment]
id = qcube
seed = 9
[qcube]
n_max = 2
per_unit = 48
rho = 0.2, 0.15, 0.12, 0.1
k = 8
cluster_gap = 0.08
)";

const char* kQcube1 = R"(
[experiment]
id = qcube
seed = 9
[qcube]
n_max = 1
per_unit = 256
rho = 0.2, 0.15, 0.1, 0.05
k = 6
)";

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Timed {
  ExperimentOutput out;
  double seconds = 0.0;
};

Timed timed_run(const char* text) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{run_experiment(Config::parse(text)), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

double num(const Json& j, const std::string& key) { return j.at(key).get<double>(); }

Outcome c1_spectral() {
  const auto r = timed_run(kSpectral);
  const double expected[] = {1.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0};
  double worst = 0.0;
  std::string got;
  for (int m = 2; m <= 5; ++m) {
    const double v = num(r.out.summary, fmt::format("extrapolated_lambda_{}", m));
    worst = std::max(worst, std::abs(v - expected[m - 2]) / expected[m - 2]);
    got += fmt::format("{}{:.6g}", m == 2 ? "" : ", ", v);
  }
  return {worst <= kSpectralRelTol && r.seconds <= kSpectralSeconds,
          fmt::format("lambda_2..5 = {} vs 1/3, 1/3, 4/3, 4/3; max rel err {:.4g} (tol {}); {:.2f} s (limit {} s)",
                      got, worst, kSpectralRelTol, r.seconds, kSpectralSeconds)};
}

Outcome c2_resolvent() {
  const auto r = timed_run(kResolvent);
  const double d = num(r.out.summary, "max_defect");
  const auto rows = r.out.tables.at("resolvent").rows.size();
  return {d <= kResolventTol && rows == 60 && r.seconds <= kResolventSeconds,
          fmt::format("max weighted L2 defect {:.3g} (tol {}) over {} solves; {:.2f} s (limit {} s)", d,
                      kResolventTol, rows, r.seconds, kResolventSeconds)};
}

Outcome c3_semigroup() {
  const auto r = timed_run(kSemigroup);
  const double e = num(r.out.summary, "max_expm_defect");
  const double l = num(r.out.summary, "max_law_defect");
  const double x = num(r.out.summary, "max_real_line_defect");
  return {e <= kSemigroupTol && l <= kSemigroupTol && x <= kSemigroupTol,
          fmt::format("expm defect {:.3g}, law defect {:.3g}, real-line defect {:.3g} (tol {}); {:.2f} s", e, l, x,
                      kSemigroupTol, r.seconds)};
}

Outcome c4_cat0() {
  const auto r = timed_run(kCat0);
  const auto& t = r.out.tables.at("cat0");
  bool counts = true;
  for (double v : t.numbers("triangles")) counts = counts && v == static_cast<double>(kTriangles);
  for (double v : t.numbers("pairs")) counts = counts && v == static_cast<double>(kPairs);
  std::string worst;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto* col : {"comparison", "cn", "projection", "nonexpansive", "step_bound"}) {
    const auto v = t.numbers(col);
    const double m = *std::min_element(v.begin(), v.end());
    min_slack = std::min(min_slack, m);
    worst += fmt::format("{}{} {:.2g}", worst.empty() ? "" : ", ", col, m);
  }
  return {counts && t.rows.size() == 6 && min_slack >= -kCat0Tol,
          fmt::format("{} targets x {} triangles / {} pairs; min slacks: {} (tol -{}); {:.2f} s", t.rows.size(),
                      kTriangles, kPairs, worst, kCat0Tol, r.seconds)};
}

Outcome c5_covering() {
  const auto r = timed_run(kCovering);
  const auto& t = r.out.tables.at("covering");
  const auto order = t.numbers("order");
  const auto bound = t.numbers("bound");
  const auto space = t.texts("space");
  const auto cs = t.numbers("c");
  std::size_t exceeded = 0;
  std::string first;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] > bound[i]) {
      if (exceeded++ == 0) first = fmt::format("{} c={} K={} > {}", space[i], cs[i], order[i], bound[i]);
    }
  }
  const auto& f = r.out.tables.at("covering_fuzz");
  const auto pts = f.numbers("points");
  const auto ex = f.numbers("exhaustive");
  const auto rnd = f.numbers("randomized");
  std::size_t disagree = 0;
  bool small = true;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    disagree += ex[i] != rnd[i];
    small = small && pts[i] <= static_cast<double>(kFuzzMaxPoints);
  }
  return {exceeded == 0 && disagree == 0 && small && ex.size() >= kFuzzMin,
          fmt::format("(c+1)^2 exceeded in {} of {} cases{}; exhaustive/randomized disagreements {} of {} fuzzed "
                      "instances (n <= {}); {:.2f} s",
                      exceeded, order.size(), exceeded ? " (first: " + first + ")" : "", disagree, ex.size(),
                      kFuzzMaxPoints, r.seconds)};
}

Outcome c6_poincare() {
  const auto r = timed_run(kPoincare);
  const double excess = num(r.out.summary, "worst_bound_excess");
  const auto& t = r.out.tables.at("compactness");
  const auto radius = t.numbers("radius");
  const auto idx = t.numbers("i");
  const auto defect = t.numbers("defect");
  const auto tail = t.numbers("tail_sup");
  const auto claim = t.numbers("claim_bound");
  const auto scope = t.texts("in_scope");
  std::size_t radius_breaks = 0;
  std::size_t i_breaks = 0;
  std::size_t claim_breaks = 0;
  std::size_t in_scope = 0;
  for (std::size_t a = 0; a < radius.size(); ++a) {
    if (scope[a] != "true") continue;
    ++in_scope;
    if (defect[a] > claim[a]) ++claim_breaks;
    for (std::size_t b = 0; b < radius.size(); ++b) {
      if (scope[b] != "true") continue;
      // smaller radius, same refinement
      if (idx[b] == idx[a] && radius[b] < radius[a] && defect[b] > defect[a] + kMonotoneSlack) ++radius_breaks;
      // later refinement, same radius
      if (radius[b] == radius[a] && idx[b] > idx[a] && tail[b] > tail[a] + kMonotoneSlack) ++i_breaks;
    }
  }
  const bool pass = excess <= 0.0 && radius_breaks == 0 && i_breaks == 0 && claim_breaks == 0 && in_scope > 0 &&
                    r.seconds <= kPoincareSeconds;
  return {pass, fmt::format("worst ratio - bound {:.3g} (<= 0); {} in-scope defects: radius-axis breaks {}, "
                            "refinement-axis breaks {}, claim-bound breaks {}; {:.2f} s (limit {} s)",
                            excess, in_scope, radius_breaks, i_breaks, claim_breaks, r.seconds, kPoincareSeconds)};
}

Outcome c7_two_point() {
  const auto r = timed_run(kTwoPoint);
  const auto& t = r.out.tables.at("two_point");
  const auto delta = t.numbers("delta");
  const auto gh = t.numbers("gh_upper");
  bool monotone = true;
  std::string trace;
  for (std::size_t i = 0; i < gh.size(); ++i) {
    if (i > 0) monotone = monotone && gh[i] <= gh[i - 1];
    trace += fmt::format("{}{:.4g}", i ? ", " : "", gh[i]);
  }
  const bool small = !gh.empty() && delta.back() == 0.125 && gh.back() < kTwoPointFactor * gh.front();
  return {monotone && small && gh.front() > 0.0 && r.seconds <= kTwoPointSeconds,
          fmt::format("gh_upper over delta 1..1/8: {} (monotone {}, final < {} x initial {}); {:.2f} s (limit {} s)",
                      trace, monotone ? "yes" : "no", kTwoPointFactor, small ? "yes" : "no", r.seconds,
                      kTwoPointSeconds)};
}

Outcome c8_tripod() {
  const auto r = timed_run(kTripod);
  const double ratio = num(r.out.summary, "energy_ratio");
  const double to_grid = num(r.out.summary, "terminal_to_grid_mean");
  const double step = num(r.out.summary, "grid_step");
  const double to_exact = num(r.out.summary, "terminal_to_exact_mean");
  return {ratio <= kTripodEnergyRatio && to_grid <= step && r.seconds <= kTripodSeconds,
          fmt::format("E(terminal)/E(u0) {:.3g} (tol {}); terminal mean to grid mean {:.3g} (grid step {}), to "
                      "exact mean {:.3g}; {:.2f} s (limit {} s)",
                      ratio, kTripodEnergyRatio, to_grid, step, to_exact, r.seconds, kTripodSeconds)};
}

Outcome c9_qcube() {
  const auto q1 = timed_run(kQcube1);
  const auto q2 = timed_run(kQcube2);
  double worst = 0.0;
  std::string ratios;
  bool simple = true;
  for (int k = 2; k <= 5; ++k) {
    const double v = num(q1.out.summary, fmt::format("n1_cluster{}_value", k));
    simple = simple && num(q1.out.summary, fmt::format("n1_cluster{}_multiplicity", k)) == 1.0;
    worst = std::max(worst, std::abs(v - k * k) / (k * k));
    ratios += fmt::format("{}{:.4g}", k == 2 ? "" : ", ", v);
  }
  std::size_t matched = 0;
  std::string mult;
  for (int c = 1; c <= 6; ++c) {
    const double a = num(q2.out.summary, fmt::format("n2_reference{}_assigned", c));
    const double e = num(q2.out.summary, fmt::format("n2_reference{}_expected", c));
    matched += a == e;
    mult += fmt::format("{}{:g}:{:g}/{:g}", c == 1 ? "" : " ",
                        num(q2.out.summary, fmt::format("n2_reference{}_value", c)), a, e);
  }
  const double seconds = q1.seconds + q2.seconds;
  return {worst <= kQcubeRelTol && simple && matched == 6 && seconds <= kQcubeSeconds,
          fmt::format("Q1 ratios {} vs 4, 9, 16, 25 (max rel err {:.3g}, tol {}); Q2 multiplicities value:got/expected "
                      "{} ({} of 6); {:.2f} s (limit {} s)",
                      ratios, worst, kQcubeRelTol, mult, matched, seconds, kQcubeSeconds)};
}

Outcome c10_determinism() {
  std::vector<fs::path> cfgs;
  for (const auto& e : fs::directory_iterator(MMVLAB_CONFIG_DIR))
    if (e.path().extension() == ".cfg") cfgs.push_back(e.path());
  std::sort(cfgs.begin(), cfgs.end());
  const auto root = fs::temp_directory_path() / "mmvlab_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& cfg : cfgs) {
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      const auto config = Config::load(cfg);
      const auto dir = root / fmt::format("{}_{}", cfg.stem().string(), run);
      write_outputs(run_experiment(config), dir, true);
      dirs.push_back(dir);
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const auto other = dirs[1] / e.path().filename();
      if (!fs::exists(other) || read_file(e.path()) != read_file(other))
        differing.push_back(cfg.stem().string() + "/" + e.path().filename().string());
    }
  }
  fs::remove_all(root);
  std::string list;
  for (const auto& d : differing) list += " " + d;
  return {!cfgs.empty() && files > 0 && differing.empty(),
          fmt::format("{} configs run twice, {} CSV files compared, {} differ{}", cfgs.size(), files,
                      differing.size(), list)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 circle spectral convergence", c1_spectral},
      {"C2 resolvent vs dense solve", c2_resolvent},
      {"C3 semigroup identities", c3_semigroup},
      {"C4 CAT(0) property suite", c4_cat0},
      {"C5 covering-order bound", c5_covering},
      {"C6 Poincare certificate and compactness", c6_poincare},
      {"C7 two-point sublevel sets", c7_two_point},
      {"C8 harmonic flow into a tripod", c8_tripod},
      {"C9 Q-cube stabilization", c9_qcube},
      {"C10 determinism", c10_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    if (!o.pass) ++failed;
    fmt::print("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
