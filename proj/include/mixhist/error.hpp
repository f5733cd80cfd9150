#pragma once

#include <stdexcept>
#include <string>

namespace mixhist {

/// Failure categories surfaced by the library. The CLI maps each to an exit code.
enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  ImageTooSmall,
  InvalidArgument,
  DimensionMismatch,
  MissingFile,
  MalformedRow,
  DuplicateId,
  ExtractionFailed,
  IOError,
  BadMagic,
  VersionMismatch,
  ChecksumMismatch,
  SchemeMismatch,
  UnknownCategory,
  CategoryTooSmall,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mixhist
