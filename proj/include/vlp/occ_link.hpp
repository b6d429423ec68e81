#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlp/scene.hpp"

namespace vlp {

inline constexpr int kPreambleChips = 5;
inline constexpr int kPayloadChips = 16;
inline constexpr int kFrameChips = kPreambleChips + kPayloadChips;
inline constexpr int kOnesPerFrame = 11;
inline constexpr int kMinDecodeChips = 2 * kFrameChips;

struct ChipSequence {
  std::vector<std::uint8_t> chips;
  double chip_rate = 0.0;

  std::string to_string() const;
  /// Parses a string of '0'/'1' characters. Throws Error(kParse) on any other character.
  static ChipSequence from_string(std::string_view text, double chip_rate = 0.0);
};

struct DecodeResult {
  int uid = 0;
  int sync_offset = 0;
  int chips_consumed = 0;
  double confidence = 0.0;
};

/// One frame: preamble 11100 followed by the 8 uid bits, MSB first, with
/// Manchester coding (1 -> 10, 0 -> 01).
ChipSequence encode_uid(int uid);

/// On/off state of the lamp at time t (the frame repeats back-to-back).
bool waveform(const LedLamp& lamp, double t);

/// Time integral of the waveform over [0, t], in seconds of "on".
double waveform_integral(const LedLamp& lamp, double t);

/// Searches for the preamble and Manchester-decodes the following payload.
/// Throws DecodeError(kNoSync) or DecodeError(kInvalidManchester).
DecodeResult decode_chips(std::span<const std::uint8_t> chips);

/// Rows per chip from binarized stripe run lengths. Runs shorter than 2 rows
/// are dropped as noise. Throws DecodeError(kDegenerateProfile) with fewer
/// than 4 runs.
double estimate_chip_rows(std::span<const int> run_lengths);

}  // namespace vlp
