#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace molcert {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (PDB text, JSON documents, CSV tables).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  /// 1-based line number, 0 when not applicable.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A precondition on numerical values or geometry was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace molcert
