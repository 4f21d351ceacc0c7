#pragma once

#include <stdexcept>
#include <string>

namespace sparsedc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (nonpositive depth, shape mismatch, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A text input (OBJ, CSV, JSON, PFM header) could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Filesystem failure; the message always names the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Least-squares alignment could not be computed (too few or degenerate samples).
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsedc
