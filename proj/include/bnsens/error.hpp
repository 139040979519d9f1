#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnsens {

/// Broad failure classes. They map one-to-one onto CLI exit codes and HTTP
/// status families, so keep the numbering stable.
enum class ErrorKind {
  parse = 1,         // malformed document, flag or expression
  infeasible = 2,    // the constraint cannot be enforced
  precondition = 3,  // well-formed input that violates an operation's contract
  timeout = 4,       // request deadline exceeded
};

/// Specific reasons, used by the service to pick status codes and by tests
/// to check that the right thing failed.
enum class Errc {
  syntax,
  unknown_variable,
  unknown_state,
  bad_table,
  row_sum,
  cycle,
  duplicate_name,
  locked_parameter,
  out_of_range,
  multi_valued,
  zero_evidence,
  non_disjoint_families,
  same_variable,
  conflicting_evidence,
  too_large,
  structure_mismatch,
  bad_constraint,
  infeasible,
  irrelevant_parameter,
  no_candidates,
  too_many_sensors,
  missing_sensor_evidence,
  deadline_exceeded,
  nothing_to_undo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, Errc code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(code) {}

  ErrorKind kind() const noexcept { return kind_; }
  Errc code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  Errc code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(ErrorKind::parse, Errc::syntax, decorate(message, line, column)),
        line_(line),
        column_(column) {}

  /// 1-based; 0 when the error has no source position.
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string decorate(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

inline Error precondition_error(Errc code, const std::string& message) {
  return Error(ErrorKind::precondition, code, message);
}

}  // namespace bnsens
