#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xmbcr {

enum class Errc {
  ZeroInverse,
  LengthMismatch,
  DuplicatePoints,
  PointCollision,
  Singular,
  DimensionMismatch,
  FieldTooSmall,
  InvalidParams,
  WrongBlockCount,
  NotEnoughShares,
  DuplicateDevice,
  NoFailures,
  TooManyFailures,
  UnknownDevice,
  WrongSlotCount,
  MissingSlot,
  InconsistentContribution,
  ShapeError,
  AlreadyFailed,
  DeviceFailed,
  BadSlot,
  IoError,
  CorruptShare,
  ManifestError,
  ChecksumMismatch,
};

inline constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DuplicatePoints: return "DuplicatePoints";
    case Errc::PointCollision: return "PointCollision";
    case Errc::Singular: return "Singular";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::FieldTooSmall: return "FieldTooSmall";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::WrongBlockCount: return "WrongBlockCount";
    case Errc::NotEnoughShares: return "NotEnoughShares";
    case Errc::DuplicateDevice: return "DuplicateDevice";
    case Errc::NoFailures: return "NoFailures";
    case Errc::TooManyFailures: return "TooManyFailures";
    case Errc::UnknownDevice: return "UnknownDevice";
    case Errc::WrongSlotCount: return "WrongSlotCount";
    case Errc::MissingSlot: return "MissingSlot";
    case Errc::InconsistentContribution: return "InconsistentContribution";
    case Errc::ShapeError: return "ShapeError";
    case Errc::AlreadyFailed: return "AlreadyFailed";
    case Errc::DeviceFailed: return "DeviceFailed";
    case Errc::BadSlot: return "BadSlot";
    case Errc::IoError: return "IoError";
    case Errc::CorruptShare: return "CorruptShare";
    case Errc::ManifestError: return "ManifestError";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace xmbcr
