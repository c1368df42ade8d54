#include <doctest.h>

#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "mmvlab/config.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/io.hpp"
#include "mmvlab/runner.hpp"
#include "mmvlab/samplers.hpp"

using namespace mmvlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mmvlab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

template <typename F>
std::string config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

const char* kResolvent = R"(
[experiment]
id = resolvent_check
seed = 12

[space]
kind = circle
n = 12

[energy]
rho = 0.9

[resolvent]
lambda = 0.5, 5
samples = 3
)";

}  // namespace

TEST_CASE("config grammar") {
  const auto c = Config::parse("# head\n[a]\nx = 1.5\nlist = 1, 2 ,3\nname = circle\n\n[b]\nflag = true\n");
  CHECK(c.real("a.x") == 1.5);
  CHECK(c.counts("a.list") == std::vector<std::size_t>{1, 2, 3});
  CHECK(c.choice("a.name", {"circle", "interval"}) == "circle");
  CHECK(c.flag("b.flag", false));
  CHECK(c.line("b.flag") == 8);
  CHECK(c.real("a.missing", 2.0) == 2.0);
  CHECK_NOTHROW(c.finish());

  CHECK(config_error([] { Config::parse("x = 1\n"); }).find("line 1") != std::string::npos);
  CHECK(config_error([] { Config::parse("[a]\nx = 1\nx = 2\n"); }).find("duplicate") != std::string::npos);
  CHECK(config_error([] { Config::parse("[a]\njunk\n"); }).find("line 2") != std::string::npos);
  CHECK(config_error([] { Config::parse("[a\n"); }).find("section") != std::string::npos);
}

TEST_CASE("config field errors name the field and line") {
  const auto c = Config::parse("[s]\nempty =\nbad = 1, x\nneg = -1\nname = foo\nunused = 3\n");
  CHECK(config_error([&] { c.reals("s.empty"); }) == "line 2: list 's.empty' is empty");
  CHECK(config_error([&] { c.reals("s.bad"); }).find("line 3") != std::string::npos);
  CHECK(config_error([&] { c.count("s.neg"); }).find("nonnegative integer") != std::string::npos);
  CHECK(config_error([&] { c.choice("s.name", {"a", "b"}); }).find("line 5") != std::string::npos);
  CHECK(config_error([&] { c.real("s.none"); }).find("missing field 's.none'") != std::string::npos);
  CHECK(config_error([&] { c.finish(); }).find("unknown field 's.unused'") != std::string::npos);
}

TEST_CASE("json round trips") {
  const auto x = sample_circle(6, 2.0 * std::numbers::pi);
  const auto y = space_from_json(space_to_json(x));
  CHECK(y.size() == 6);
  CHECK((y.dist() - x.dist()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((y.weight() - x.weight()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(y.chart() == x.chart());

  const auto domain = share(x);
  auto tree = std::make_shared<const MetricTree>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 2.0}});
  const auto prod = TargetSpace::product({TargetSpace::tree(tree, TreePoint{1, 0.5}), TargetSpace::euclidean(2)});
  MappedFunction u{domain, prod, {}};
  for (std::size_t i = 0; i < 6; ++i) {
    u.values.emplace_back(std::vector<TargetPoint>{TargetPoint(TreePoint{i % 2, 0.1 * static_cast<double>(i)}),
                                                   TargetPoint(Eigen::VectorXd(Eigen::Vector2d(0.1 * static_cast<double>(i), -1.0 / 3.0)))});
  }
  const auto v = map_from_json(domain, map_to_json(u));
  CHECK(lp_distance(u, v, 2.0) == 0.0);
  CHECK(v.target->describe() == prod->describe());

  Json bad = space_to_json(x);
  bad["dist"][0][1] = 99.0;
  CHECK_THROWS(space_from_json(bad));
}

TEST_CASE("matrix market and formatting") {
  Eigen::MatrixXd m(2, 3);
  m << 1.0 / 3.0, -2.0, 1e-300, 0.1, 5.0, -0.0;
  const auto back = parse_matrix_market(matrix_market(m));
  CHECK(back.rows() == 2);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_THROWS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2\n"));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run_experiment validates the config") {
  CHECK_THROWS_AS(run_experiment(Config::parse("[experiment]\nid = nope\nseed = 1\n")), ConfigError);
  CHECK_THROWS_AS(run_experiment(Config::parse("[experiment]\nid = resolvent_check\n")), ConfigError);
  const auto extra = std::string(kResolvent) + "typo = 1\n";
  CHECK(config_error([&] { run_experiment(Config::parse(extra)); }).find("unknown field 'resolvent.typo'") !=
        std::string::npos);
  const auto empty = std::string(kResolvent).replace(std::string(kResolvent).find("0.5, 5"), 6, "");
  CHECK(config_error([&] { run_experiment(Config::parse(empty)); }).find("'resolvent.lambda' is empty") !=
        std::string::npos);
}

TEST_CASE("outputs are written with a manifest and are reproducible") {
  const auto out = run_experiment(Config::parse(kResolvent));
  CHECK(out.summary["max_defect"].get<double>() <= 1e-8);
  const auto dir = scratch("outputs");
  const auto res = write_outputs(out, dir, false);
  REQUIRE(res.files.back() == "manifest.json");
  const auto manifest = read_json_file(dir / "manifest.json");
  CHECK(manifest["experiment"] == "resolvent_check");
  for (const auto& f : manifest["files"]) {
    const auto bytes = read_file(dir / f["name"].get<std::string>());
    CHECK(f["sha256"] == sha256_hex(bytes));
    CHECK(f["bytes"].get<std::size_t>() == bytes.size());
  }
  CHECK_THROWS_AS(write_outputs(out, dir, false), IoError);
  CHECK_NOTHROW(write_outputs(out, dir, true));

  const auto again = run_experiment(Config::parse(kResolvent));
  for (const auto& [stem, table] : out.tables) CHECK(again.tables.at(stem).csv() == table.csv());
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ConfigError("f", 1, "x")) == 2);
  CHECK(exit_code(InvalidArgument("x")) == 2);
  CHECK(exit_code(InvalidSpace("x")) == 2);
  CHECK(exit_code(SolverError("x", 1.0)) == 3);
  CHECK(exit_code(IoError("x")) == 4);
  CHECK(exit_code(std::runtime_error("x")) == 1);
}

TEST_CASE("run_config writes to the requested directory") {
  const auto dir = scratch("run_config");
  fs::create_directories(dir);
  write_file(dir / "c.cfg", kResolvent, true);
  RunOptions o;
  o.output = dir / "out";
  const auto r = run_config(dir / "c.cfg", o);
  CHECK(r.directory == dir / "out");
  CHECK(fs::exists(dir / "out" / "resolvent.csv"));
  CHECK_THROWS_AS(run_config(dir / "missing.cfg", o), IoError);
  fs::remove_all(dir);
}
