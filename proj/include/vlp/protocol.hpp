#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vlp/scene.hpp"
#include "vlp/vlp_solver.hpp"

namespace vlp {

// Wire messages. Each is one JSON object per line with a mandatory "type".

struct FixMessage {
  std::string agent_id;
  AgentKind kind = AgentKind::kSmartphone;
  std::int64_t t_ms = 0;
  double x = 0.0, y = 0.0, z = 0.0;
  double yaw = 0.0;
  Scheme scheme = Scheme::kSingleLed;
  double residual_px = 0.0;
  int n_leds = 0;

  bool operator==(const FixMessage&) const = default;
};

/// Published instead of a fix when an agent cannot be positioned this tick.
struct DiagMessage {
  std::string agent_id;
  AgentKind kind = AgentKind::kSmartphone;
  std::int64_t t_ms = 0;
  std::string reason;  // "NoFix"
  std::string detail;

  bool operator==(const DiagMessage&) const = default;
};

struct NavGoal {
  double x = 0.0, y = 0.0;
  std::int64_t issued_t_ms = 0;

  bool operator==(const NavGoal&) const = default;
};

enum class ControlCommand { kPause, kResume, kFollowOn, kFollowOff, kScriptedOn, kScriptedOff };

struct ControlMessage {
  ControlCommand command = ControlCommand::kPause;

  bool operator==(const ControlMessage&) const = default;
};

struct SnapshotLamp {
  int uid = 0;
  double x = 0.0, y = 0.0;
  LampShape shape = LampShape::kCircle;
  double size_m = 0.0;

  bool operator==(const SnapshotLamp&) const = default;
};

struct TruthState {
  double x = 0.0, y = 0.0, z = 0.0, yaw = 0.0;

  bool operator==(const TruthState&) const = default;
};

struct SnapshotAgent {
  std::string agent_id;
  AgentKind kind = AgentKind::kSmartphone;
  std::optional<FixMessage> fix;
  std::optional<TruthState> truth;  // debug overlay only

  bool operator==(const SnapshotAgent&) const = default;
};

struct SceneSnapshot {
  std::vector<SnapshotLamp> lamps;
  FloorBounds floor;
  std::vector<SnapshotAgent> agents;

  bool operator==(const SceneSnapshot&) const = default;
};

using Message = std::variant<FixMessage, DiagMessage, NavGoal, ControlMessage, SceneSnapshot>;

/// Canonical single-line JSON (sorted keys) terminated by '\n'.
std::string encode_message(const Message& msg);
/// Accepts a line with or without the trailing newline. Unknown fields are
/// ignored. Throws Error(kMalformedMessage).
Message decode_message(std::string_view line);

std::string to_string(ControlCommand cmd);

}  // namespace vlp
