#include "mixhist/error.hpp"

namespace mixhist {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptImage: return "CorruptImage";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ExtractionFailed: return "ExtractionFailed";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::SchemeMismatch: return "SchemeMismatch";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::CategoryTooSmall: return "CategoryTooSmall";
  }
  return "Unknown";
}

}  // namespace mixhist
