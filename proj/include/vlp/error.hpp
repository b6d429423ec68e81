#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlp {

enum class ErrorCode {
  kParse,
  kValidation,
  kUnknownUid,
  kNoSync,
  kInvalidManchester,
  kDegenerateProfile,
  kNeedMoreRows,
  kTooSmall,
  kDegenerateGeometry,
  kMissingYaw,
  kNoConvergence,
  kNoFix,
  kMalformedMessage,
  kBind,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Decoder failure. `confidence` is meaningful for kInvalidManchester,
/// `chips_seen` for kNeedMoreRows.
class DecodeError : public Error {
 public:
  DecodeError(ErrorCode code, const std::string& what, double confidence = 0.0, int chips_seen = 0)
      : Error(code, what), confidence_(confidence), chips_seen_(chips_seen) {}

  double confidence() const noexcept { return confidence_; }
  int chips_seen() const noexcept { return chips_seen_; }

 private:
  double confidence_;
  int chips_seen_;
};

}  // namespace vlp
