#include <doctest.h>

#include <cstring>
#include <limits>
#include <random>

#include "message_fuzzer.hpp"
#include "vlp/error.hpp"
#include "vlp/protocol.hpp"

using namespace vlp;

namespace {

bool malformed(std::string_view line) {
  try {
    decode_message(line);
  } catch (const Error& e) {
    return e.code() == ErrorCode::kMalformedMessage;
  }
  return false;
}

}  // namespace

TEST_CASE("fuzz corpus round-trips exactly and canonically") {
  fuzz::Fuzzer fuzz(2024);
  for (int i = 0; i < 1000; ++i) {
    const Message m = fuzz.any();
    const std::string line = encode_message(m);
    REQUIRE(line.back() == '\n');
    CHECK(line.find('\n') == line.size() - 1);
    const Message back = decode_message(line);
    CHECK(back == m);
    CHECK(encode_message(back) == line);
  }
}

TEST_CASE("fix with x = 1.0 decodes bit-equal") {
  FixMessage f;
  f.agent_id = "phone";
  f.x = 1.0;
  f.y = 0.1;
  const auto back = std::get<FixMessage>(decode_message(encode_message(f)));
  CHECK(std::memcmp(&back.x, &f.x, sizeof(double)) == 0);
  CHECK(std::memcmp(&back.y, &f.y, sizeof(double)) == 0);
}

TEST_CASE("wire shape of a fix") {
  FixMessage f{"robot", AgentKind::kRobot, 33, 0.5, -0.25, 0.2, 1.5, Scheme::kDoubleLed, 0.125, 2};
  CHECK(encode_message(f) ==
        "{\"agent_id\":\"robot\",\"kind\":\"robot\",\"n_leds\":2,\"residual_px\":0.125,\"scheme\":\"DoubleLed\","
        "\"t_ms\":33,\"type\":\"fix\",\"x\":0.5,\"y\":-0.25,\"yaw\":1.5,\"z\":0.2}\n");
}

TEST_CASE("unknown fields are ignored") {
  const Message m = decode_message(R"({"type":"goal","x":1.5,"y":-0.5,"issued_t_ms":10,"extra":[1,2,{"a":null}]})");
  CHECK(std::get<NavGoal>(m) == NavGoal{1.5, -0.5, 10});
  const Message c = decode_message("{\"command\":\"follow_off\",\"type\":\"control\",\"who\":\"me\"}\r\n");
  CHECK(std::get<ControlMessage>(c).command == ControlCommand::kFollowOff);
}

TEST_CASE("goal without issued time defaults to zero") {
  CHECK(std::get<NavGoal>(decode_message(R"({"type":"goal","x":0,"y":0})")).issued_t_ms == 0);
}

TEST_CASE("malformed lines") {
  CHECK(malformed(R"({"x":1})"));
  CHECK(malformed(""));
  CHECK(malformed("not json"));
  CHECK(malformed("[1,2]"));
  CHECK(malformed(R"({"type":"teleport"})"));
  CHECK(malformed(R"({"type":5})"));
  CHECK(malformed(R"({"type":"goal","x":"1","y":0})"));
  CHECK(malformed(R"({"type":"goal","x":1})"));
  CHECK(malformed(R"({"type":"control","command":"explode"})"));
  CHECK(malformed(R"({"type":"fix","agent_id":"a","kind":"robot","t_ms":1.5,"x":0,"y":0,"z":0,"yaw":0,"scheme":"SingleLed","residual_px":0,"n_leds":1})"));
  CHECK(malformed(R"({"type":"fix","agent_id":"a","kind":"drone","t_ms":1,"x":0,"y":0,"z":0,"yaw":0,"scheme":"SingleLed","residual_px":0,"n_leds":1})"));
  CHECK(malformed(R"({"type":"fix","agent_id":"a","kind":"robot","t_ms":1,"x":0,"y":0,"z":0,"yaw":0,"scheme":"Magic","residual_px":0,"n_leds":1})"));
  CHECK(malformed(R"({"type":"scene","lamps":{},"floor":{},"agents":[]})"));
  CHECK(malformed("{\"type\":\"goal\",\"x\":1,\"y\":2}\n{\"type\":\"goal\"}"));
}

TEST_CASE("snapshot with null fix and no truth") {
  SceneSnapshot s;
  s.lamps = {{1, -1, -1, LampShape::kCircle, 0.175}};
  s.agents = {{"robot", AgentKind::kRobot, std::nullopt, std::nullopt}};
  const std::string line = encode_message(s);
  CHECK(line.find("\"fix\":null") != std::string::npos);
  CHECK(line.find("truth") == std::string::npos);
  CHECK(std::get<SceneSnapshot>(decode_message(line)) == s);
}
