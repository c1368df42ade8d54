#include "mmvlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "mmvlab/error.hpp"
#include "mmvlab/io.hpp"

namespace mmvlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

template <class T>
std::optional<T> parse_number(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || !valid_name(trim(line.substr(1, line.size() - 2)))) {
        throw ConfigError("section", lineno, fmt::format("line {}: malformed section header '{}'", lineno, line));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line", lineno, fmt::format("line {}: expected 'key = value'", lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    if (!valid_name(key)) throw ConfigError(key, lineno, fmt::format("line {}: malformed key '{}'", lineno, key));
    if (section.empty()) {
      throw ConfigError(key, lineno, fmt::format("line {}: key '{}' outside of a section", lineno, key));
    }
    const std::string field = section + "." + key;
    if (cfg.entries_.count(field)) {
      throw ConfigError(field, lineno, fmt::format("line {}: duplicate field '{}'", lineno, field));
    }
    cfg.entries_[field] = Entry{trim(line.substr(eq + 1)), lineno};
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) { return parse(read_file(path)); }

bool Config::has(const std::string& field) const { return entries_.count(field) > 0; }

std::size_t Config::line(const std::string& field) const {
  const auto it = entries_.find(field);
  return it == entries_.end() ? 0 : it->second.line;
}

const Config::Entry& Config::entry(const std::string& field) const {
  const auto it = entries_.find(field);
  if (it == entries_.end()) throw ConfigError(field, 0, fmt::format("missing field '{}'", field));
  it->second.used = true;
  return it->second;
}

std::string Config::text(const std::string& field) const {
  const auto& e = entry(field);
  if (e.value.empty()) throw ConfigError(field, e.line, fmt::format("line {}: field '{}' is empty", e.line, field));
  return e.value;
}

std::string Config::text(const std::string& field, const std::string& fallback) const {
  return has(field) ? text(field) : fallback;
}

std::string Config::choice(const std::string& field, const std::vector<std::string>& allowed) const {
  const auto v = text(field);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    throw ConfigError(field, line(field), fmt::format("line {}: field '{}' must be one of {}, got '{}'", line(field),
                                                      field, fmt::join(allowed, ", "), v));
  }
  return v;
}

std::string Config::choice(const std::string& field, const std::vector<std::string>& allowed,
                           const std::string& fallback) const {
  return has(field) ? choice(field, allowed) : fallback;
}

double Config::real(const std::string& field) const {
  const auto& e = entry(field);
  const auto v = parse_number<double>(e.value);
  if (!v || !std::isfinite(*v)) {
    throw ConfigError(field, e.line, fmt::format("line {}: field '{}' must be a finite number, got '{}'", e.line, field, e.value));
  }
  return *v;
}

double Config::real(const std::string& field, double fallback) const { return has(field) ? real(field) : fallback; }

std::size_t Config::count(const std::string& field) const {
  const auto& e = entry(field);
  const auto v = parse_number<std::size_t>(e.value);
  if (!v) {
    throw ConfigError(field, e.line, fmt::format("line {}: field '{}' must be a nonnegative integer, got '{}'", e.line, field, e.value));
  }
  return *v;
}

std::size_t Config::count(const std::string& field, std::size_t fallback) const {
  return has(field) ? count(field) : fallback;
}

std::uint64_t Config::seed(const std::string& field) const {
  const auto& e = entry(field);
  const auto v = parse_number<std::uint64_t>(e.value);
  if (!v) throw ConfigError(field, e.line, fmt::format("line {}: field '{}' must be an unsigned seed, got '{}'", e.line, field, e.value));
  return *v;
}

bool Config::flag(const std::string& field, bool fallback) const {
  if (!has(field)) return fallback;
  const auto v = choice(field, {"true", "false"});
  return v == "true";
}

std::vector<double> Config::reals(const std::string& field) const {
  const auto& e = entry(field);
  if (e.value.empty()) throw ConfigError(field, e.line, fmt::format("line {}: list '{}' is empty", e.line, field));
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) {
    const auto v = parse_number<double>(item);
    if (!v || !std::isfinite(*v)) {
      throw ConfigError(field, e.line, fmt::format("line {}: list '{}' has a bad entry '{}'", e.line, field, item));
    }
    out.push_back(*v);
  }
  return out;
}

std::vector<double> Config::reals(const std::string& field, const std::vector<double>& fallback) const {
  return has(field) ? reals(field) : fallback;
}

std::vector<std::size_t> Config::counts(const std::string& field) const {
  const auto& e = entry(field);
  if (e.value.empty()) throw ConfigError(field, e.line, fmt::format("line {}: list '{}' is empty", e.line, field));
  std::vector<std::size_t> out;
  for (const auto& item : split_list(e.value)) {
    const auto v = parse_number<std::size_t>(item);
    if (!v) throw ConfigError(field, e.line, fmt::format("line {}: list '{}' has a bad entry '{}'", e.line, field, item));
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> Config::texts(const std::string& field) const {
  const auto& e = entry(field);
  if (e.value.empty()) throw ConfigError(field, e.line, fmt::format("line {}: list '{}' is empty", e.line, field));
  auto out = split_list(e.value);
  for (const auto& item : out)
    if (item.empty()) throw ConfigError(field, e.line, fmt::format("line {}: list '{}' has an empty entry", e.line, field));
  return out;
}

std::map<std::string, std::string> Config::fields() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, e] : entries_) out[k] = e.value;
  return out;
}

void Config::finish() const {
  const Entry* first = nullptr;
  std::string name;
  for (const auto& [field, e] : entries_) {
    if (!e.used && (!first || e.line < first->line)) {
      first = &e;
      name = field;
    }
  }
  if (first) throw ConfigError(name, first->line, fmt::format("line {}: unknown field '{}'", first->line, name));
}

}  // namespace mmvlab
