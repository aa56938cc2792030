#pragma once

#include <stdexcept>
#include <string>

namespace bodyfit {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (mesh, config, image header). Carries the 1-based
/// line number when one is known, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Corrupt, truncated or version-mismatched model container.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

/// An image with no usable foreground.
class EmptySilhouetteError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration key or value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument violates an operation precondition (dimension mismatch,
/// out-of-range parameter, empty input).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace bodyfit
