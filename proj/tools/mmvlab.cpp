#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mmvlab/energy.hpp"
#include "mmvlab/error.hpp"
#include "mmvlab/flow.hpp"
#include "mmvlab/functional.hpp"
#include "mmvlab/gh.hpp"
#include "mmvlab/io.hpp"
#include "mmvlab/runner.hpp"
#include "mmvlab/samplers.hpp"
#include "mmvlab/spectral.hpp"

#ifndef MMVLAB_CONFIG_DIR
#define MMVLAB_CONFIG_DIR "configs"
#endif

using namespace mmvlab;
namespace fs = std::filesystem;

namespace {

struct Common {
  bool json = false;
  bool force = false;
};

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& content, bool force) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content, force);
  }
}

void report(const Common& common, const Json& j, const std::string& text) {
  if (common.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

EnergyConfig energy_flags(double rho, double p, const std::string& h, double kappa) {
  EnergyConfig cfg;
  cfg.rho = rho;
  cfg.p = p;
  cfg.kappa = kappa;
  cfg.h_mode = h == "distance" ? EnergyConfig::HMode::PairwiseDistance : EnergyConfig::HMode::ConstantRho;
  return cfg;
}

SpacePtr load_space(const std::string& path) { return share(space_from_json(read_json_file(path))); }

MappedFunction load_map(SpacePtr domain, const std::string& path) {
  const auto j = read_json_file(path);
  if (j.contains("domain") && j["domain"].is_string()) {
    const auto label = j["domain"].get<std::string>();
    if (!label.empty() && !domain->label().empty() && label != domain->label()) {
      throw ConfigError("domain", 0, fmt::format("map was written for domain '{}', not '{}'", label, domain->label()));
    }
  }
  return map_from_json(std::move(domain), j);
}

std::vector<fs::path> configs_for(const fs::path& dir, const std::string& id) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw IoError(fmt::format("config directory {} not found", dir.string()));
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    const auto cfg = Config::load(entry.path());
    if (cfg.has("experiment.id") && cfg.text("experiment.id") == id) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measured metric spaces, energies, flows and spectral experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--json", common.json, "Machine-readable JSON on stdout");
  app.add_flag("--force", common.force, "Overwrite existing output files");

  // space gen
  auto* space = app.add_subcommand("space", "Space utilities");
  space->require_subcommand(1);
  auto* gen = space->add_subcommand("gen", "Sample a model space and print its JSON");
  std::string kind;
  std::size_t n = 0;
  double len = 0.0;
  std::vector<std::size_t> points;
  std::vector<double> sides;
  std::size_t dim = 1;
  std::size_t per_unit = 8;
  std::vector<double> legs;
  std::size_t interior = 0;
  std::string space_out;
  gen->add_option("--kind", kind, "circle | interval | cube | qcube | star")
      ->required()
      ->check(CLI::IsMember({"circle", "interval", "cube", "qcube", "star"}));
  gen->add_option("--n", n, "Number of points (circle, interval)");
  gen->add_option("--len", len, "Circumference or interval length (default 2 pi / 1)");
  gen->add_option("--points", points, "Points per axis (cube)");
  gen->add_option("--sides", sides, "Side lengths (cube)");
  gen->add_option("--dim", dim, "Dimension of Q_n (qcube)");
  gen->add_option("--per-unit", per_unit, "Grid intervals per unit length (qcube)");
  gen->add_option("--legs", legs, "Leg lengths of a star tree (star)");
  gen->add_option("--interior", interior, "Interior points per edge (star)");
  gen->add_option("--out", space_out, "Output file (default stdout)");

  // energy assemble
  auto* energy_cmd = app.add_subcommand("energy", "Energy utilities");
  energy_cmd->require_subcommand(1);
  auto* assemble = energy_cmd->add_subcommand("assemble", "Assemble the generator A = W^-1 L as Matrix Market");
  std::string space_path;
  double rho = 0.0;
  double p = 2.0;
  std::string h = "rho";
  double kappa = 1.0;
  std::string gen_out;
  std::string weights_out;
  assemble->add_option("--space", space_path, "Space JSON")->required();
  assemble->add_option("--rho", rho, "Interaction radius")->required();
  assemble->add_option("--p", p, "Exponent (the generator needs p = 2)");
  assemble->add_option("--denominator", h, "Denominator h: rho | distance")->check(CLI::IsMember({"rho", "distance"}));
  assemble->add_option("--kappa", kappa, "Ball-volume comparison constant");
  assemble->add_option("--out", gen_out, "Matrix Market output file")->required();
  assemble->add_option("--weights", weights_out, "Weights JSON sidecar (default <out>.weights.json)");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Eigenpairs of a generator");
  std::string gen_path;
  std::string weights_path;
  std::size_t k = 10;
  bool vectors = false;
  spectrum->add_option("--gen", gen_path, "Generator in Matrix Market format")->required();
  spectrum->add_option("--weights", weights_path, "Weights JSON sidecar")->required();
  spectrum->add_option("--k", k, "Number of eigenpairs");
  spectrum->add_flag("--vectors", vectors, "Include eigenvectors");

  // resolvent
  auto* resolvent_cmd = app.add_subcommand("resolvent", "J_lambda of a map under the rho-energy");
  std::string map_path;
  double lambda = 1.0;
  double tol = 1e-13;
  std::string map_out;
  resolvent_cmd->add_option("--space", space_path, "Domain space JSON")->required();
  resolvent_cmd->add_option("--map", map_path, "Map JSON")->required();
  resolvent_cmd->add_option("--rho", rho, "Interaction radius")->required();
  resolvent_cmd->add_option("--p", p, "Exponent");
  resolvent_cmd->add_option("--lambda", lambda, "Step size")->required();
  resolvent_cmd->add_option("--tol", tol, "Relative sweep tolerance");
  resolvent_cmd->add_option("--out", map_out, "Output map JSON (default stdout)");

  // flow
  auto* flow_cmd = app.add_subcommand("flow", "Harmonic-map flow along a lambda schedule");
  std::vector<double> lambdas;
  std::string mode = "resolvent_path";
  std::string trace_out;
  flow_cmd->add_option("--space", space_path, "Domain space JSON")->required();
  flow_cmd->add_option("--map", map_path, "Initial map JSON")->required();
  flow_cmd->add_option("--rho", rho, "Interaction radius")->required();
  flow_cmd->add_option("--p", p, "Exponent");
  flow_cmd->add_option("--lambda", lambdas, "Lambda schedule")->required();
  flow_cmd->add_option("--mode", mode, "resolvent_path | proximal_steps")
      ->check(CLI::IsMember({"resolvent_path", "proximal_steps"}));
  flow_cmd->add_option("--tol", tol, "Relative sweep tolerance");
  flow_cmd->add_option("--trace", trace_out, "Trace CSV output (default stdout)");
  flow_cmd->add_option("--out", map_out, "Terminal map JSON output");

  // gh
  auto* gh = app.add_subcommand("gh", "Gromov-Hausdorff bounds between two spaces");
  std::string x_path;
  std::string y_path;
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  gh->add_option("--x", x_path, "First space JSON")->required();
  gh->add_option("--y", y_path, "Second space JSON")->required();
  gh->add_option("--budget", budget, "Hill-climbing moves");
  gh->add_option("--seed", seed, "Search seed");

  // experiment / run
  auto* experiment = app.add_subcommand("experiment", "Run the stock configs of one experiment");
  std::string id;
  std::string config_dir = MMVLAB_CONFIG_DIR;
  std::string out_dir;
  experiment->add_option("id", id, "Experiment id")->required()->check(CLI::IsMember(experiment_ids()));
  experiment->add_option("--config-dir", config_dir, "Directory of stock configs");
  experiment->add_option("--out", out_dir, "Output directory (one subdirectory per config)");
  auto* run = app.add_subcommand("run", "Run an experiment config");
  std::string config_path;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides [experiment] output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      FiniteMetricMeasureSpace x = [&] {
        if (kind == "circle") return sample_circle(n, len > 0.0 ? len : 2.0 * std::numbers::pi);
        if (kind == "interval") return sample_interval(n, len > 0.0 ? len : 1.0);
        if (kind == "cube") return sample_cube(points, sides);
        if (kind == "qcube") return sample_qcube(dim, per_unit);
        std::vector<TreeEdge> edges;
        for (std::size_t i = 0; i < legs.size(); ++i) edges.push_back({0, i + 1, legs[i]});
        return sample_tree(edges, interior);
      }();
      emit(space_out, space_to_json(x).dump() + "\n", common.force);
    } else if (*assemble) {
      const auto domain = load_space(space_path);
      const EnergyForm form(domain, energy_flags(rho, p, h, kappa));
      const auto g = assemble_generator(form);
      const std::string wpath = weights_out.empty() ? gen_out + ".weights.json" : weights_out;
      Json w;
      w["weights"] = std::vector<double>(g.weight.data(), g.weight.data() + g.weight.size());
      if (!common.force) {
        for (const auto& path : {gen_out, wpath})
          if (fs::exists(path)) throw IoError(fmt::format("{} exists (use --force to overwrite)", path));
      }
      write_file(gen_out, matrix_market(g.matrix), true);
      write_file(wpath, w.dump() + "\n", true);
      Json j{{"generator", gen_out}, {"weights", wpath}, {"n", domain->size()}, {"nonzeros", form.nonzeros()},
             {"components", form.components()}, {"warnings", form.warnings()}};
      std::string text = fmt::format("wrote {} and {} (n = {}, {} kernel entries, {} components)\n", gen_out, wpath,
                                     domain->size(), form.nonzeros(), form.components());
      for (const auto& msg : form.warnings()) text += "warning: " + msg + "\n";
      report(common, j, text);
    } else if (*spectrum) {
      Generator g;
      g.matrix = parse_matrix_market(read_file(gen_path));
      const auto wj = read_json_file(weights_path);
      if (!wj.contains("weights")) throw ConfigError("weights", 0, "weights file needs a 'weights' array");
      const auto wv = wj["weights"].get<std::vector<double>>();
      g.weight = Eigen::Map<const Eigen::VectorXd>(wv.data(), static_cast<Eigen::Index>(wv.size()));
      if (g.weight.size() != g.matrix.rows() || g.matrix.rows() != g.matrix.cols()) {
        throw ConfigError("weights", 0, "generator and weights disagree in size");
      }
      const auto s = eigensolve(g, std::min<std::size_t>(k, static_cast<std::size_t>(g.matrix.rows())));
      std::string text;
      for (Eigen::Index i = 0; i < s.values.size(); ++i) text += format_double(s.values(i)) + "\n";
      if (common.json || vectors) {
        std::cout << spectrum_to_json(s, vectors).dump(2) << "\n";
      } else {
        std::cout << text;
      }
    } else if (*resolvent_cmd) {
      const auto domain = load_space(space_path);
      const auto u = load_map(domain, map_path);
      auto cfg = energy_flags(rho, p, "rho", 1.0);
      const auto e = ConvexFunctional::from_energy(EnergyForm(domain, cfg), u.target);
      ResolventOptions ro;
      ro.tol = tol;
      ResolventStats st;
      const auto j = resolvent(e, u, lambda, ro, &st);
      emit(map_out, map_to_json(j).dump() + "\n", common.force);
      if (!map_out.empty() && map_out != "-") {
        report(common, {{"sweeps", st.sweeps}, {"residual", st.residual}, {"energy", e(j)}},
               fmt::format("sweeps {} residual {} energy {}\n", st.sweeps, format_double(st.residual),
                           format_double(e(j))));
      }
    } else if (*flow_cmd) {
      const auto domain = load_space(space_path);
      const auto u0 = load_map(domain, map_path);
      const auto e = ConvexFunctional::from_energy(EnergyForm(domain, energy_flags(rho, p, "rho", 1.0)), u0.target);
      FlowSchedule sched;
      sched.mode = mode == "resolvent_path" ? FlowSchedule::Mode::ResolventPath : FlowSchedule::Mode::ProximalSteps;
      sched.lambdas = lambdas;
      ResolventOptions ro;
      ro.tol = tol;
      const auto trace = harmonic_flow(e, u0, sched, ro);
      emit(trace_out, trace.csv(), common.force);
      if (!map_out.empty()) write_file(map_out, map_to_json(trace.iterates.back()).dump() + "\n", common.force);
    } else if (*gh) {
      const auto x = space_from_json(read_json_file(x_path));
      const auto y = space_from_json(read_json_file(y_path));
      GhSearchBudget b;
      b.iterations = budget;
      b.seed = seed;
      const auto up = gh_upper(x, y, b);
      const double lo = gh_lower(x, y);
      Json pairs = Json::array();
      for (const auto& [a, c] : up.witness.pairs) pairs.push_back({a, c});
      report(common, {{"upper", up.bound}, {"lower", lo}, {"restarts", up.restarts}, {"witness", pairs}},
             fmt::format("upper {}\nlower {}\n", format_double(up.bound), format_double(lo)));
    } else if (*experiment) {
      const auto files = configs_for(config_dir, id);
      if (files.empty()) throw ConfigError("experiment.id", 0, fmt::format("no config for '{}' in {}", id, config_dir));
      Json all = Json::array();
      for (const auto& f : files) {
        RunOptions o;
        o.force = common.force;
        if (!out_dir.empty()) o.output = fs::path(out_dir) / f.stem();
        const auto r = run_config(f, o);
        all.push_back({{"config", f.string()}, {"directory", r.directory.string()}, {"files", r.files}});
        if (!common.json) std::cout << fmt::format("{} -> {}\n", f.string(), r.directory.string());
      }
      if (common.json) std::cout << all.dump(2) << "\n";
    } else if (*run) {
      RunOptions o;
      o.force = common.force;
      if (!out_dir.empty()) o.output = out_dir;
      const auto r = run_config(config_path, o);
      report(common, {{"directory", r.directory.string()}, {"files", r.files}},
             fmt::format("wrote {} files to {}\n", r.files.size(), r.directory.string()));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
