#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "vlp/error.hpp"
#include "vlp/occ_link.hpp"

using namespace vlp;

namespace {

std::vector<std::uint8_t> bits(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (char c : s) out.push_back(c == '1');
  return out;
}

ErrorCode decode_code(const std::vector<std::uint8_t>& chips, double* confidence = nullptr) {
  try {
    decode_chips(chips);
  } catch (const DecodeError& e) {
    if (confidence) *confidence = e.confidence();
    return e.code();
  }
  FAIL("decode unexpectedly succeeded");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("encode_uid: table examples") {
  CHECK(encode_uid(0x00).to_string() == "111000101010101010101");
  CHECK(encode_uid(0xFF).to_string() == "111001010101010101010");
  CHECK(encode_uid(0xA5).to_string() == "111001001100101100110");
}

TEST_CASE("encode_uid agrees with a bit-table oracle for every uid") {
  for (int uid = 0; uid < 256; ++uid) CHECK(encode_uid(uid).to_string() == oracle::frame_string(uid));
}

TEST_CASE("every frame has 11 ones and no 3-run inside the payload") {
  for (int uid = 0; uid < 256; ++uid) {
    const auto c = encode_uid(uid).chips;
    REQUIRE(c.size() == 21);
    CHECK(std::accumulate(c.begin(), c.end(), 0) == kOnesPerFrame);
    for (std::size_t i = 5; i + 2 < c.size(); ++i) CHECK_FALSE((c[i] == c[i + 1] && c[i + 1] == c[i + 2]));
  }
}

TEST_CASE("the preamble is the only sync match across a frame boundary") {
  for (int uid = 0; uid < 256; ++uid) {
    const std::string s = oracle::frame_string(uid) + oracle::frame_string(uid);
    std::vector<std::size_t> hits;
    for (std::size_t p = s.find("11100"); p != std::string::npos; p = s.find("11100", p + 1)) hits.push_back(p);
    CHECK(hits == std::vector<std::size_t>{0, 21});
  }
}

TEST_CASE("waveform examples") {
  LedLamp lamp;
  lamp.uid = 0x00;
  lamp.chip_rate = 2000.0;
  CHECK(waveform(lamp, 0.0));
  CHECK(waveform(lamp, 21.0 / 2000.0));
  CHECK_FALSE(waveform(lamp, 5.25 / 2000.0));
  // Periodic with period 21 chips.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    lamp.uid = static_cast<int>(rng() % 256);
    const double a = t(rng);
    CHECK(waveform(lamp, a) == waveform(lamp, a + 21.0 / lamp.chip_rate));
  }
}

TEST_CASE("waveform_integral matches brute-force sampling") {
  LedLamp lamp;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> t(0.0, 0.05);
  for (int i = 0; i < 20; ++i) {
    lamp.uid = static_cast<int>(rng() % 256);
    lamp.chip_rate = 1000.0 + 500.0 * (i % 7);
    const double b = t(rng);
    const double brute = b * oracle::sampled_mean([&](double x) { return waveform(lamp, x); }, 0.0, b);
    CHECK(waveform_integral(lamp, b) == doctest::Approx(brute).epsilon(1e-4));
  }
  // Duty cycle 11/21 over whole frames.
  CHECK(waveform_integral(lamp, 21.0 / lamp.chip_rate) == doctest::Approx(11.0 / lamp.chip_rate));
}

TEST_CASE("decode_chips: 0xA5 rotated by 7") {
  auto s = encode_uid(0xA5).chips;
  std::vector<std::uint8_t> two(s);
  two.insert(two.end(), s.begin(), s.end());
  std::rotate(two.begin(), two.begin() + 14, two.end());  // the preamble now starts at chip 7
  const DecodeResult r = decode_chips(two);
  CHECK(r.uid == 0xA5);
  CHECK(r.sync_offset == 7);
  CHECK(r.confidence == 1.0);
}

TEST_CASE("decode_chips round trip over all uids and rotations") {
  for (int uid = 0; uid < 256; ++uid) {
    const std::string frame = oracle::frame_string(uid);
    for (int rot = 0; rot < 21; ++rot) {
      const std::string stream = (frame + frame).substr(static_cast<std::size_t>(rot)) + frame.substr(0, rot);
      const DecodeResult r = decode_chips(bits(stream));
      CHECK(r.uid == uid);
      CHECK(r.confidence == 1.0);
    }
  }
}

TEST_CASE("decode_chips failures") {
  CHECK(decode_code(std::vector<std::uint8_t>(42, 1)) == ErrorCode::kNoSync);
  CHECK(decode_code(std::vector<std::uint8_t>(42, 0)) == ErrorCode::kNoSync);
}

TEST_CASE("a single payload flip gives InvalidManchester at 7/8") {
  for (int uid = 0; uid < 256; ++uid) {
    for (int chip = kPreambleChips; chip < kFrameChips; ++chip) {
      auto frame = encode_uid(uid).chips;
      frame[static_cast<std::size_t>(chip)] ^= 1;
      std::vector<std::uint8_t> stream(frame);
      stream.insert(stream.end(), frame.begin(), frame.end());
      double confidence = -1.0;
      const ErrorCode code = decode_code(stream, &confidence);
      // The preamble at chip 0 is intact, so the first sync is always there.
      CHECK(code == ErrorCode::kInvalidManchester);
      CHECK(confidence == 7.0 / 8.0);
    }
  }
}

TEST_CASE("chip strings round trip and reject junk") {
  const ChipSequence c = ChipSequence::from_string("1110 0\n0101");
  CHECK(c.to_string() == "111000101");
  CHECK_THROWS_AS(ChipSequence::from_string("10x1"), Error);
}

TEST_CASE("estimate_chip_rows examples") {
  const std::vector<int> exact{10, 10, 30, 20, 10, 20, 10};
  CHECK(estimate_chip_rows(exact) == doctest::Approx(10.0));
  const std::vector<int> perturbed{9, 11, 30, 19, 10, 21};
  CHECK(std::abs(estimate_chip_rows(perturbed) - 10.0) <= 0.5);
  const std::vector<int> one{12};
  CHECK_THROWS_AS(estimate_chip_rows(one), DecodeError);
  // Sub-2-row slivers are ignored.
  const std::vector<int> slivers{1, 10, 1, 20, 10, 1, 30};
  CHECK(estimate_chip_rows(slivers) == doctest::Approx(10.0));
}

TEST_CASE("estimate_chip_rows recovers the period from jittered stripe runs") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> width(3.0, 40.0);
  std::uniform_int_distribution<int> mult(1, 3);
  std::uniform_int_distribution<int> jitter(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const double w = width(rng);
    std::vector<int> runs;
    // Make sure at least one single-chip run is present, as in any real frame.
    runs.push_back(static_cast<int>(std::lround(w)));
    for (int i = 0; i < 8; ++i) runs.push_back(std::max(2, static_cast<int>(std::lround(mult(rng) * w)) + jitter(rng)));
    CHECK(estimate_chip_rows(runs) == doctest::Approx(w).epsilon(std::max(0.05, 1.5 / w)));
  }
}
