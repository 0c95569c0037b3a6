#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace life {

enum class ErrorCode {
  InvalidName,
  StaleRevision,
  UnknownCollection,
  NotFound,
  EmptyInput,
  ContentBeforeFirstRecord,
  TierMisalignment,
  UnknownLineMarker,
  SchemaViolation,
  CsvShapeError,
  InvalidIri,
  UnderflowRemoval,
  EmptyHeldout,
  InvalidCredentials,
  Unauthenticated,
  Forbidden,
  UnsupportedFormat,
  InvalidArgument,
  Conflict,
  PayloadTooLarge,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Base of every error the library throws. The code is stable and is what
// the HTTP layer maps onto status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Error tied to a position in a text input. Line and column are 1-based;
// column counts code points.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, std::size_t column,
             const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

// JSON/JSONL schema problem. `where` is a JSON pointer ("/entries/0/headword")
// or, for line-oriented inputs, "line N".
class SchemaError : public Error {
 public:
  SchemaError(std::string where, const std::string& message);

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class StaleRevisionError : public Error {
 public:
  explicit StaleRevisionError(std::string current_rev);

  const std::string& current_rev() const noexcept { return current_rev_; }

 private:
  std::string current_rev_;
};

}  // namespace life
