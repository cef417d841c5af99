#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace matbake {

/// Error classes raised by the library. Each maps to a fixed process exit
/// code (see exit_code()) so scripts can branch on the failure kind.
enum class ErrorCode {
  FileNotFound,
  IoError,
  ParseError,
  DecodeError,
  MissingUVs,
  EmptyMesh,
  DegenerateExtent,
  InvalidArgument,
  ShapeMismatch,
  LengthMismatch,
  BackendUnavailable,
  ProtocolError,
  MissingClass,
  RangeError,
  EmptyOverlap,
  TooSmall,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Process exit status for a given error class. 0 and 1 are reserved for
/// success and command-line usage errors.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Wraps an error with the name of the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& inner)
      : Error(inner.code(), "[" + stage + "] " + inner.detail()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace matbake
