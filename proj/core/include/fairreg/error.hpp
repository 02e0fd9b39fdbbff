#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fairreg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (u outside [0,1],
/// cross-entropy prediction outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed arguments: empty inputs, length mismatches, bad loss parameters.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid configuration (spline basis larger than the sample,
/// empty CV grids, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Root finding or bracketing failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input: CSV schema, JSON documents.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap. Carries the last iterate
/// (intercept first, then weights).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

/// A group is too small for the requested fit.
class GroupSizeError : public Error {
 public:
  GroupSizeError(const std::string& what, std::string group)
      : Error(what), group_(std::move(group)) {}

  const std::string& group() const noexcept { return group_; }

 private:
  std::string group_;
};

}  // namespace fairreg
