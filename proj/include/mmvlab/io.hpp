#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mmvlab/energy.hpp"
#include "mmvlab/mapping.hpp"
#include "mmvlab/space.hpp"
#include "mmvlab/spectral.hpp"
#include "mmvlab/target.hpp"

namespace mmvlab {

using Json = nlohmann::json;

/// {"n", "dist", "weight", "label"} plus "coords"/"chart"/"period" when the
/// space carries model coordinates.
Json space_to_json(const FiniteMetricMeasureSpace& x);
/// Accepts the distance form or {"coords", "metric": "l2" | "linf", "weight"};
/// the distance form is validated. Throws ConfigError naming the field.
FiniteMetricMeasureSpace space_from_json(const Json& j);

Json target_to_json(const TargetSpace& y);
TargetPtr target_from_json(const Json& j);
Json point_to_json(const TargetSpace& y, const TargetPoint& p);
TargetPoint point_from_json(const TargetSpace& y, const Json& j);

/// {"domain": label, "target": ..., "values": [...]}
Json map_to_json(const MappedFunction& u);
MappedFunction map_from_json(SpacePtr domain, const Json& j);

Json spectrum_to_json(const Spectrum& s, bool with_vectors);
Json report_to_json(const ConvergenceReport& r);

/// Dense Matrix Market "array real general" text.
std::string matrix_market(const Eigen::MatrixXd& m);
Eigen::MatrixXd parse_matrix_market(const std::string& text);
/// Comma-separated rows, 17 significant digits.
std::string matrix_csv(const Eigen::MatrixXd& m);

using CsvCell = std::variant<double, std::string>;

/// A CSV table with a header row; numbers use 17 significant digits.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  /// Throws InvalidArgument when the row width differs from the header.
  void add(std::vector<CsvCell> row);
  std::string csv() const;
  /// Numeric column by name (NaN for text cells).
  std::vector<double> numbers(const std::string& column) const;
  std::vector<std::string> texts(const std::string& column) const;

  static CsvTable from_report(const ConvergenceReport& r);
  static CsvTable from_summary(const std::vector<std::pair<std::string, double>>& summary);
};

/// `%.17g`-style formatting shared by every writer.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
/// Throws IoError when the file exists and `force` is false, or on failure.
void write_file(const std::filesystem::path& path, const std::string& content, bool force);
Json read_json_file(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace mmvlab
