#include "life/error.hpp"

namespace life {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::StaleRevision: return "StaleRevision";
    case ErrorCode::UnknownCollection: return "UnknownCollection";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ContentBeforeFirstRecord: return "ContentBeforeFirstRecord";
    case ErrorCode::TierMisalignment: return "TierMisalignment";
    case ErrorCode::UnknownLineMarker: return "UnknownLineMarker";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::CsvShapeError: return "CsvShapeError";
    case ErrorCode::InvalidIri: return "InvalidIri";
    case ErrorCode::UnderflowRemoval: return "UnderflowRemoval";
    case ErrorCode::EmptyHeldout: return "EmptyHeldout";
    case ErrorCode::InvalidCredentials: return "InvalidCredentials";
    case ErrorCode::Unauthenticated: return "Unauthenticated";
    case ErrorCode::Forbidden: return "Forbidden";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string positioned(std::size_t line, std::size_t column, const std::string& message) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

}  // namespace

ParseError::ParseError(ErrorCode code, std::size_t line, std::size_t column,
                       const std::string& message)
    : Error(code, positioned(line, column, message)),
      line_(line),
      column_(column),
      detail_(message) {}

SchemaError::SchemaError(std::string where, const std::string& message)
    : Error(ErrorCode::SchemaViolation, where + ": " + message), where_(std::move(where)) {}

StaleRevisionError::StaleRevisionError(std::string current_rev)
    : Error(ErrorCode::StaleRevision, "revision mismatch; current revision is '" + current_rev + "'"),
      current_rev_(std::move(current_rev)) {}

}  // namespace life
