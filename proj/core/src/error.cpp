#include "matbake/error.hpp"

namespace matbake {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::MissingUVs: return "MissingUVs";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::TooSmall: return "TooSmall";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return 2;
    case ErrorCode::IoError: return 3;
    case ErrorCode::ParseError:
    case ErrorCode::DecodeError: return 4;
    case ErrorCode::MissingUVs:
    case ErrorCode::EmptyMesh:
    case ErrorCode::DegenerateExtent: return 5;
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingClass:
    case ErrorCode::RangeError: return 6;
    case ErrorCode::ShapeMismatch:
    case ErrorCode::LengthMismatch: return 7;
    case ErrorCode::BackendUnavailable: return 8;
    case ErrorCode::ProtocolError: return 9;
    case ErrorCode::EmptyOverlap:
    case ErrorCode::TooSmall: return 10;
  }
  return 70;
}

}  // namespace matbake
