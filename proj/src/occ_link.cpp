#include "vlp/occ_link.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vlp/error.hpp"

namespace vlp {

namespace {

constexpr std::array<std::uint8_t, kPreambleChips> kPreamble = {1, 1, 1, 0, 0};

std::array<std::uint8_t, kFrameChips> frame_chips(int uid) {
  std::array<std::uint8_t, kFrameChips> out{};
  for (int i = 0; i < kPreambleChips; ++i) out[i] = kPreamble[i];
  for (int bit = 0; bit < 8; ++bit) {
    const bool one = ((uid >> (7 - bit)) & 1) != 0;
    out[kPreambleChips + 2 * bit] = one ? 1 : 0;
    out[kPreambleChips + 2 * bit + 1] = one ? 0 : 1;
  }
  return out;
}

// Frame chips for every uid, computed once.
const std::array<std::array<std::uint8_t, kFrameChips>, 256>& frame_table() {
  static const auto table = [] {
    std::array<std::array<std::uint8_t, kFrameChips>, 256> t{};
    for (int uid = 0; uid < 256; ++uid) t[uid] = frame_chips(uid);
    return t;
  }();
  return table;
}

std::size_t chip_index(double chips_elapsed) {
  const double n = std::floor(chips_elapsed);
  return static_cast<std::size_t>(std::fmod(n, static_cast<double>(kFrameChips)));
}

}  // namespace

std::string ChipSequence::to_string() const {
  std::string s;
  s.reserve(chips.size());
  for (auto c : chips) s.push_back(c ? '1' : '0');
  return s;
}

ChipSequence ChipSequence::from_string(std::string_view text, double chip_rate) {
  ChipSequence seq;
  seq.chip_rate = chip_rate;
  for (char c : text) {
    if (c == '0' || c == '1') {
      seq.chips.push_back(c == '1' ? 1 : 0);
    } else if (c != ' ' && c != '\n' && c != '\r' && c != '\t') {
      throw Error(ErrorCode::kParse, std::string("invalid chip character '") + c + "'");
    }
  }
  return seq;
}

ChipSequence encode_uid(int uid) {
  const auto& frame = frame_table().at(static_cast<std::size_t>(uid & 0xFF));
  return {{frame.begin(), frame.end()}, 0.0};
}

bool waveform(const LedLamp& lamp, double t) {
  if (!lamp.modulated) return true;
  const auto& frame = frame_table()[static_cast<std::size_t>(lamp.uid & 0xFF)];
  return frame[chip_index(t * lamp.chip_rate)] != 0;
}

double waveform_integral(const LedLamp& lamp, double t) {
  if (!lamp.modulated) return t;
  const auto& frame = frame_table()[static_cast<std::size_t>(lamp.uid & 0xFF)];
  const double chips = t * lamp.chip_rate;
  const double whole = std::floor(chips);
  const double frames = std::floor(whole / kFrameChips);
  const int rem = static_cast<int>(whole - frames * kFrameChips);
  double on = frames * kOnesPerFrame;
  for (int i = 0; i < rem; ++i) on += frame[i];
  on += (chips - whole) * frame[rem];
  return on / lamp.chip_rate;
}

DecodeResult decode_chips(std::span<const std::uint8_t> chips) {
  const int n = static_cast<int>(chips.size());
  for (int off = 0; off + kFrameChips <= n; ++off) {
    bool sync = true;
    for (int i = 0; i < kPreambleChips && sync; ++i) sync = chips[off + i] == kPreamble[i];
    if (!sync) continue;

    int uid = 0;
    int valid = 0;
    for (int bit = 0; bit < 8; ++bit) {
      const auto a = chips[off + kPreambleChips + 2 * bit];
      const auto b = chips[off + kPreambleChips + 2 * bit + 1];
      uid <<= 1;
      if (a != b) {
        ++valid;
        uid |= a;
      }
    }
    const double confidence = valid / 8.0;
    if (valid != 8) {
      throw DecodeError(ErrorCode::kInvalidManchester,
                        "invalid Manchester pair after sync at chip " + std::to_string(off),
                        confidence);
    }
    return {uid, off, off + kFrameChips, confidence};
  }
  throw DecodeError(ErrorCode::kNoSync, "no preamble in " + std::to_string(n) + " chips");
}

double estimate_chip_rows(std::span<const int> run_lengths) {
  std::vector<double> runs;
  for (int r : run_lengths) {
    if (r >= 2) runs.push_back(r);
  }
  if (runs.size() < 4) {
    throw DecodeError(ErrorCode::kDegenerateProfile,
                      std::to_string(runs.size()) + " usable stripe runs, need 4");
  }
  double unit = *std::min_element(runs.begin(), runs.end());
  // First pass divides by the shortest run; the refinement re-quantizes
  // against the mean so one short outlier does not skew the multiples.
  for (int pass = 0; pass < 4; ++pass) {
    double sum = 0.0;
    for (double r : runs) sum += r / std::max(1.0, std::round(r / unit));
    const double next = sum / static_cast<double>(runs.size());
    if (next == unit) break;
    unit = next;
  }
  return unit;
}

}  // namespace vlp
