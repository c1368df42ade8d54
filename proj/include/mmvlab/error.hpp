#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmvlab {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-side precondition was violated (bad index, bad parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A distance matrix / weight vector does not describe a measured metric space.
class InvalidSpace : public Error {
 public:
  using Error::Error;
};

// An iterative solver exhausted its budget.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual)
      : Error(what), residual_(last_residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Malformed configuration or input document. `line` is 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, std::size_t line, const std::string& what)
      : Error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmvlab
