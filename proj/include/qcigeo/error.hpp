#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcigeo {

enum class ErrorKind {
  invalid_argument,
  morse_violation,
  not_a_geodesic,
  out_of_range,
  syntax,
  unknown_identifier,
  domain,
  empty_fiber,
  no_convergence,
  panel_limit,
  degenerate_fit,
  malformed_file,
  config,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::morse_violation: return "morse-violation";
    case ErrorKind::not_a_geodesic: return "not-a-geodesic";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::unknown_identifier: return "unknown-identifier";
    case ErrorKind::domain: return "domain";
    case ErrorKind::empty_fiber: return "empty-fiber";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::panel_limit: return "panel-limit";
    case ErrorKind::degenerate_fit: return "degenerate-fit";
    case ErrorKind::malformed_file: return "malformed-file";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure in a symbol expression. `offset` is the 1-based byte
/// position of the offending character (length + 1 at end of input).
class SyntaxError : public Error {
 public:
  SyntaxError(ErrorKind kind, std::size_t offset, const std::string& what)
      : Error(kind, what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Malformed report/cache file; `line` is 1-based, 0 when not line-specific.
class FileError : public Error {
 public:
  FileError(std::size_t line, const std::string& what)
      : Error(ErrorKind::malformed_file,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace qcigeo
