#pragma once

#include <stdexcept>
#include <string>

namespace fiberaudit {

/// Bad argument: dimension mismatch, non-finite coordinates, violated precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A map or search was configured in a way its definition does not allow
/// (n <= m, a == b for the Urysohn map, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed descriptor / config document. `where()` is a JSON pointer or
/// a "line L, column C" string.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::string where)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Malformed prime code.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The map produced a non-finite value, or a root search could not reach
/// its tolerance (e.g. the map is discontinuous along the path).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fiberaudit
