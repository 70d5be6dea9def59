#pragma once

#include <stdexcept>
#include <string>

namespace poropinn {

// Every library failure derives from Error so callers can catch one type and
// map the concrete kind onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent layer spec or parameter shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or out-of-domain evaluation input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Non-finite intermediate value during evaluation or training.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid physical or manufactured-solution parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (bad key, bad value, inconsistent sizes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// API misuse such as an empty batch or mismatched state shapes.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed checkpoint or config text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A verification check (finite-difference conformance) exceeded its tolerance.
class CheckFailure : public Error {
 public:
  using Error::Error;
};

/// Well-formed input whose contents contradict an expected shape.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace poropinn
