#include "vorann/error.hpp"

namespace vorann {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RecordTooLarge: return "RecordTooLarge";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptIndex: return "CorruptIndex";
    case ErrorCode::UnknownPoint: return "UnknownPoint";
    case ErrorCode::UnknownStart: return "UnknownStart";
    case ErrorCode::ExhaustedGraph: return "ExhaustedGraph";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace vorann
