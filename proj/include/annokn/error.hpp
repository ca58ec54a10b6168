#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace annokn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line` is 1-based; 0 means "whole file".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(line == 0 ? "parse error: " + reason
                        : "parse error at line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t actual)
      : Error("dimension mismatch (" + what + "): " + std::to_string(expected) + " vs " +
              std::to_string(actual)),
        expected_(expected), actual_(actual) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class ZeroVarianceColumn : public Error {
 public:
  ZeroVarianceColumn(std::size_t column, const std::string& name = {})
      : Error("column " + (name.empty() ? std::to_string(column) : "'" + name + "'") +
              " has zero variance"),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DuplicateSnpId : public Error {
 public:
  explicit DuplicateSnpId(const std::string& id) : Error("duplicate SNP id: " + id) {}
};

class InvalidQ : public Error {
 public:
  explicit InvalidQ(double q) : Error("target FDR q must lie in (0, 1), got " + std::to_string(q)) {}
};

class DegenerateCV : public Error {
 public:
  using Error::Error;
};

class NonFiniteObjective : public Error {
 public:
  using Error::Error;
};

/// Bad configuration value; `key` names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& reason)
      : Error("config key '" + key + "': " + reason), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace annokn
