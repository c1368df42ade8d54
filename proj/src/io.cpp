#include "mmvlab/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(key, 0, fmt::format("missing field '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(key, 0, fmt::format("field '{}' has the wrong type: {}", key, e.what()));
  }
}

Eigen::MatrixXd matrix_from_json(const Json& rows, const char* key) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(key, 0, fmt::format("'{}' must be a nonempty array of rows", key));
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != m) {
      throw ConfigError(key, 0, fmt::format("row {} of '{}' has the wrong length", i, key));
    }
    for (Eigen::Index k = 0; k < m; ++k) out(i, k) = r[static_cast<std::size_t>(k)].get<double>();
  }
  return out;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const Json& a, const char* key) {
  if (!a.is_array()) throw ConfigError(key, 0, fmt::format("'{}' must be an array", key));
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::Euclidean:
      return "euclidean";
    case Chart::Periodic:
      return "periodic";
    case Chart::None:
      break;
  }
  return "none";
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

Json space_to_json(const FiniteMetricMeasureSpace& x) {
  Json j;
  j["n"] = x.size();
  j["dist"] = matrix_to_json(x.dist());
  j["weight"] = vector_to_json(x.weight());
  j["label"] = x.label();
  if (x.chart() != Chart::None) {
    j["chart"] = chart_name(x.chart());
    j["coords"] = matrix_to_json(x.coords());
    if (x.chart() == Chart::Periodic) j["period"] = x.period();
  }
  return j;
}

FiniteMetricMeasureSpace space_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("space", 0, "space document must be a JSON object");
  const std::string label = j.contains("label") ? field<std::string>(j, "label") : std::string();
  Eigen::VectorXd weight;
  if (j.contains("dist")) {
    const Eigen::MatrixXd d = matrix_from_json(j.at("dist"), "dist");
    if (j.contains("n") && field<std::size_t>(j, "n") != static_cast<std::size_t>(d.rows())) {
      throw ConfigError("n", 0, "'n' does not match the distance matrix");
    }
    weight = j.contains("weight") ? vector_from_json(j.at("weight"), "weight")
                                  : Eigen::VectorXd::Constant(d.rows(), 1.0 / static_cast<double>(d.rows()));
    auto x = FiniteMetricMeasureSpace::validated(d, weight, label);
    if (j.contains("coords")) {
      const auto chart = field<std::string>(j, "chart");
      const Chart c = chart == "periodic" ? Chart::Periodic : chart == "euclidean" ? Chart::Euclidean : Chart::None;
      if (c == Chart::None) throw ConfigError("chart", 0, fmt::format("unknown chart '{}'", chart));
      x = x.with_coords(matrix_from_json(j.at("coords"), "coords"), c,
                        c == Chart::Periodic ? field<double>(j, "period") : 0.0);
    }
    return x;
  }
  if (j.contains("coords")) {
    const Eigen::MatrixXd c = matrix_from_json(j.at("coords"), "coords");
    const std::string metric = j.contains("metric") ? field<std::string>(j, "metric") : "l2";
    if (metric != "l2" && metric != "linf") throw ConfigError("metric", 0, fmt::format("unknown metric '{}'", metric));
    weight = j.contains("weight") ? vector_from_json(j.at("weight"), "weight")
                                  : Eigen::VectorXd::Constant(c.rows(), 1.0 / static_cast<double>(c.rows()));
    auto x = FiniteMetricMeasureSpace::trusted(coordinate_metric(c, metric), weight, label);
    return metric == "l2" ? x.with_coords(c, Chart::Euclidean) : x;
  }
  throw ConfigError("dist", 0, "space needs either 'dist' or 'coords'");
}

Json target_to_json(const TargetSpace& y) {
  Json j;
  switch (y.kind()) {
    case TargetSpace::Kind::Euclidean:
      j["kind"] = "euclidean";
      j["dim"] = y.dim();
      break;
    case TargetSpace::Kind::Tree: {
      j["kind"] = "tree";
      Json edges = Json::array();
      for (const auto& e : y.metric_tree().edges()) edges.push_back({e.from, e.to, e.length});
      j["edges"] = edges;
      break;
    }
    case TargetSpace::Kind::FiniteMetric:
      j["kind"] = "finite";
      j["space"] = space_to_json(y.finite_space());
      break;
    case TargetSpace::Kind::Product: {
      j["kind"] = "product";
      Json f = Json::array();
      for (const auto& t : y.factors()) f.push_back(target_to_json(*t));
      j["factors"] = f;
      break;
    }
  }
  if (y.kind() != TargetSpace::Kind::Product) j["basepoint"] = point_to_json(y, y.basepoint());
  return j;
}

TargetPtr target_from_json(const Json& j) {
  const auto kind = field<std::string>(j, "kind");
  if (kind == "euclidean" || kind == "real") {
    const auto dim = kind == "real" ? std::size_t{1} : field<std::size_t>(j, "dim");
    return TargetSpace::euclidean(dim);
  }
  if (kind == "tree") {
    std::vector<TreeEdge> edges;
    for (const auto& e : field<Json>(j, "edges")) {
      if (!e.is_array() || e.size() != 3) throw ConfigError("edges", 0, "tree edges are [from, to, length]");
      edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
    }
    auto tree = std::make_shared<const MetricTree>(std::move(edges));
    TreePoint base{};
    if (j.contains("basepoint")) {
      const auto& b = j.at("basepoint");
      base = {b.at(0).get<std::size_t>(), b.at(1).get<double>()};
    }
    return TargetSpace::tree(tree, base);
  }
  if (kind == "finite") {
    auto space = share(space_from_json(field<Json>(j, "space")));
    const std::size_t base = j.contains("basepoint") ? field<std::size_t>(j, "basepoint") : 0;
    return TargetSpace::finite(space, base);
  }
  if (kind == "product") {
    std::vector<TargetPtr> f;
    for (const auto& t : field<Json>(j, "factors")) f.push_back(target_from_json(t));
    return TargetSpace::product(std::move(f));
  }
  throw ConfigError("kind", 0, fmt::format("unknown target kind '{}'", kind));
}

Json point_to_json(const TargetSpace& y, const TargetPoint& p) {
  switch (y.kind()) {
    case TargetSpace::Kind::Euclidean:
      return vector_to_json(p.coords());
    case TargetSpace::Kind::Tree:
      return Json::array({p.tree_point().edge, p.tree_point().offset});
    case TargetSpace::Kind::FiniteMetric:
      return p.index();
    case TargetSpace::Kind::Product: {
      Json a = Json::array();
      for (std::size_t i = 0; i < y.factors().size(); ++i) a.push_back(point_to_json(*y.factors()[i], p.parts()[i]));
      return a;
    }
  }
  return {};
}

TargetPoint point_from_json(const TargetSpace& y, const Json& j) {
  TargetPoint p;
  try {
    switch (y.kind()) {
      case TargetSpace::Kind::Euclidean:
        p = TargetPoint(vector_from_json(j, "values"));
        break;
      case TargetSpace::Kind::Tree:
        p = TargetPoint(TreePoint{j.at(0).get<std::size_t>(), j.at(1).get<double>()});
        break;
      case TargetSpace::Kind::FiniteMetric:
        p = TargetPoint(j.get<std::size_t>());
        break;
      case TargetSpace::Kind::Product: {
        std::vector<TargetPoint> parts;
        for (std::size_t i = 0; i < y.factors().size(); ++i) parts.push_back(point_from_json(*y.factors()[i], j.at(i)));
        p = TargetPoint(std::move(parts));
        break;
      }
    }
    y.check(p);
  } catch (const Json::exception& e) {
    throw ConfigError("values", 0, fmt::format("malformed target point: {}", e.what()));
  } catch (const InvalidArgument& e) {
    throw ConfigError("values", 0, e.what());
  }
  return p;
}

Json map_to_json(const MappedFunction& u) {
  Json j;
  j["domain"] = u.domain->label();
  j["target"] = target_to_json(*u.target);
  Json v = Json::array();
  for (const auto& p : u.values) v.push_back(point_to_json(*u.target, p));
  j["values"] = v;
  return j;
}

MappedFunction map_from_json(SpacePtr domain, const Json& j) {
  MappedFunction u{std::move(domain), target_from_json(field<Json>(j, "target")), {}};
  for (const auto& v : field<Json>(j, "values")) u.values.push_back(point_from_json(*u.target, v));
  if (u.values.size() != u.domain->size()) {
    throw ConfigError("values", 0, fmt::format("{} values for a domain of {} points", u.values.size(), u.domain->size()));
  }
  return u;
}

Json spectrum_to_json(const Spectrum& s, bool with_vectors) {
  Json j;
  j["dimension"] = s.dimension;
  j["eigenvalues"] = vector_to_json(s.values);
  j["weights"] = vector_to_json(s.weight);
  Json clusters = Json::array();
  for (const auto& [v, m] : cluster(s.values, 1e-8)) clusters.push_back({{"value", v}, {"multiplicity", m}});
  j["clusters"] = clusters;
  if (with_vectors) j["eigenvectors"] = matrix_to_json(s.vectors.transpose());
  return j;
}

Json report_to_json(const ConvergenceReport& r) {
  Json j;
  j["experiment"] = r.experiment;
  j["axis"] = {{"name", r.axis_name}, {"values", r.axis}};
  j["traces"] = r.trace_names;
  Json summary = Json::object();
  for (const auto& [k, v] : r.summary) summary[k] = v;
  j["summary"] = summary;
  j["notes"] = r.notes;
  return j;
}

void CsvTable::add(std::vector<CsvCell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument(fmt::format("row of width {} for {} columns", row.size(), columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string CsvTable::csv() const {
  std::string out = fmt::format("{}\n", fmt::join(columns, ","));
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      if (const auto* d = std::get_if<double>(&row[c])) {
        out += format_double(*d);
      } else {
        out += std::get<std::string>(row[c]);
      }
    }
    out += "\n";
  }
  return out;
}

std::vector<double> CsvTable::numbers(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw InvalidArgument(fmt::format("no column '{}'", column));
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& row : rows) {
    const auto* d = std::get_if<double>(&row[c]);
    out.push_back(d ? *d : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::vector<std::string> CsvTable::texts(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw InvalidArgument(fmt::format("no column '{}'", column));
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<std::string> out;
  for (const auto& row : rows) {
    const auto* d = std::get_if<double>(&row[c]);
    out.push_back(d ? format_double(*d) : std::get<std::string>(row[c]));
  }
  return out;
}

CsvTable CsvTable::from_report(const ConvergenceReport& r) {
  CsvTable t;
  t.columns.push_back(r.axis_name);
  for (const auto& n : r.trace_names) t.columns.push_back(n);
  for (std::size_t i = 0; i < r.axis.size(); ++i) {
    std::vector<CsvCell> row{r.axis[i]};
    for (Eigen::Index k = 0; k < r.traces.rows(); ++k) row.emplace_back(r.traces(k, static_cast<Eigen::Index>(i)));
    t.add(std::move(row));
  }
  return t;
}

CsvTable CsvTable::from_summary(const std::vector<std::pair<std::string, double>>& summary) {
  CsvTable t;
  t.columns = {"key", "value"};
  for (const auto& [k, v] : summary) t.add({k, v});
  return t;
}

std::string matrix_market(const Eigen::MatrixXd& m) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += fmt::format("{} {}\n", m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) out += format_double(m(r, c)) + "\n";
  return out;
}

Eigen::MatrixXd parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix array real general", 0) != 0) {
    throw ConfigError("header", 1, "expected a dense real Matrix Market header");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(dims >> rows >> cols) || rows <= 0 || cols <= 0) throw ConfigError("size", lineno, "bad Matrix Market size line");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!(in >> m(r, c))) throw ConfigError("entries", lineno, "Matrix Market file ended early");
    }
  }
  return m;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ",";
      out += format_double(m(r, c));
    }
    out += "\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw IoError(fmt::format("{} exists (use --force to overwrite)", path.string()));
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out) throw IoError(fmt::format("write to {} failed", path.string()));
}

Json read_json_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string(), 0, fmt::format("{} is not valid JSON: {}", path.string(), e.what()));
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

}  // namespace mmvlab
