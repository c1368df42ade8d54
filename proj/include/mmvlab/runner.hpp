#pragma once

#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmvlab/config.hpp"
#include "mmvlab/io.hpp"

namespace mmvlab {

/// Tables (file stem -> table) and a JSON summary produced by one experiment.
struct ExperimentOutput {
  std::string id;
  std::map<std::string, CsvTable> tables;
  Json summary;
};

/// The experiment ids accepted in `[experiment] id`.
const std::vector<std::string>& experiment_ids();

/// Runs the experiment named in the config without touching the disk.
/// Consumes every field; unknown fields raise ConfigError. Solver failures
/// are rethrown as SolverError prefixed with the experiment id.
ExperimentOutput run_experiment(const Config& config);

struct RunOptions {
  bool force = false;
  std::optional<std::filesystem::path> output;  // overrides `[experiment] output`
};

struct RunResult {
  std::filesystem::path directory;
  std::vector<std::string> files;  // relative to `directory`, manifest last
};

/// <stem>.csv per table, summary.json, then manifest.json listing every
/// file with its SHA-256. Refuses to overwrite without `force`.
RunResult write_outputs(const ExperimentOutput& out, const std::filesystem::path& directory,
                        bool force, const Json& params = Json::object());

/// Loads, runs and writes. Output directory: options.output, else
/// `[experiment] output`.
RunResult run_config(const std::filesystem::path& path, const RunOptions& options = {});

/// 2 for configuration errors, 3 for solver failures, 4 for I/O, 1 otherwise.
int exit_code(const std::exception& e);

}  // namespace mmvlab
