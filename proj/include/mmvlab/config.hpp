#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmvlab {

/// Flat key-value configuration:
///
///   # comment
///   [section]
///   key = value
///   list = 0.4, 0.3, 0.2
///
/// Fields are addressed as "section.key". Every typed getter marks its field
/// as used; `finish()` rejects fields nobody asked for. All errors are
/// ConfigError carrying the field name and its line.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& field) const;
  std::size_t line(const std::string& field) const;

  std::string text(const std::string& field) const;
  std::string text(const std::string& field, const std::string& fallback) const;
  std::string choice(const std::string& field, const std::vector<std::string>& allowed) const;
  std::string choice(const std::string& field, const std::vector<std::string>& allowed,
                     const std::string& fallback) const;
  double real(const std::string& field) const;
  double real(const std::string& field, double fallback) const;
  std::size_t count(const std::string& field) const;
  std::size_t count(const std::string& field, std::size_t fallback) const;
  std::uint64_t seed(const std::string& field) const;
  bool flag(const std::string& field, bool fallback) const;
  /// Comma-separated, nonempty.
  std::vector<double> reals(const std::string& field) const;
  std::vector<double> reals(const std::string& field, const std::vector<double>& fallback) const;
  std::vector<std::size_t> counts(const std::string& field) const;
  std::vector<std::string> texts(const std::string& field) const;

  /// Every field with its raw text, ordered by name.
  std::map<std::string, std::string> fields() const;

  /// Throws for the first unused field (in file order).
  void finish() const;

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    mutable bool used = false;
  };
  const Entry& entry(const std::string& field) const;
  std::map<std::string, Entry> entries_;
};

}  // namespace mmvlab
