#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array length does not match the grid, or the grid is too small.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent options (e.g. Simpson rule on an even node count).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Field contains NaN or Inf.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// omega <= alpha^2: no standing wave exists.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// v(0) = 0 with P(v) < 0: the Pohozaev scaling has no root in (0, 1].
class DegenerateTraceError : public Error {
 public:
  using Error::Error;
};

class ZeroFieldError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment config; carries the 1-based position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace dnls
