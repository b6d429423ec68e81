#include "vlp/protocol.hpp"

#include <nlohmann/json.hpp>

#include "vlp/error.hpp"

namespace vlp {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformedMessage, what); }

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) malformed(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

AgentKind kind_of(const json& j) {
  const std::string k = text(j, "kind");
  if (k == "robot") return AgentKind::kRobot;
  if (k == "smartphone") return AgentKind::kSmartphone;
  malformed("unknown kind '" + k + "'");
}

json fix_json(const FixMessage& m) {
  return {{"type", "fix"},   {"agent_id", m.agent_id},
          {"kind", to_string(m.kind)}, {"t_ms", m.t_ms},
          {"x", m.x},        {"y", m.y},
          {"z", m.z},        {"yaw", m.yaw},
          {"scheme", to_string(m.scheme)}, {"residual_px", m.residual_px},
          {"n_leds", m.n_leds}};
}

FixMessage fix_from(const json& j) {
  FixMessage m;
  m.agent_id = text(j, "agent_id");
  m.kind = kind_of(j);
  m.t_ms = integer(j, "t_ms");
  m.x = number(j, "x");
  m.y = number(j, "y");
  m.z = number(j, "z");
  m.yaw = number(j, "yaw");
  try {
    m.scheme = scheme_from_string(text(j, "scheme"));
  } catch (const Error& e) {
    malformed(e.detail());
  }
  m.residual_px = number(j, "residual_px");
  m.n_leds = static_cast<int>(integer(j, "n_leds"));
  return m;
}

ControlCommand command_from(const std::string& s) {
  for (auto c : {ControlCommand::kPause, ControlCommand::kResume, ControlCommand::kFollowOn,
                 ControlCommand::kFollowOff, ControlCommand::kScriptedOn, ControlCommand::kScriptedOff}) {
    if (to_string(c) == s) return c;
  }
  malformed("unknown control command '" + s + "'");
}

json floor_json(const FloorBounds& f) {
  return {{"x_min", f.x_min}, {"x_max", f.x_max}, {"y_min", f.y_min}, {"y_max", f.y_max}};
}

struct Encoder {
  json operator()(const FixMessage& m) const { return fix_json(m); }
  json operator()(const DiagMessage& m) const {
    return {{"type", "diag"}, {"agent_id", m.agent_id}, {"kind", to_string(m.kind)},
            {"t_ms", m.t_ms}, {"reason", m.reason},     {"detail", m.detail}};
  }
  json operator()(const NavGoal& m) const {
    return {{"type", "goal"}, {"x", m.x}, {"y", m.y}, {"issued_t_ms", m.issued_t_ms}};
  }
  json operator()(const ControlMessage& m) const {
    return {{"type", "control"}, {"command", to_string(m.command)}};
  }
  json operator()(const SceneSnapshot& m) const {
    json lamps = json::array();
    for (const auto& l : m.lamps) {
      lamps.push_back({{"uid", l.uid}, {"x", l.x}, {"y", l.y}, {"shape", to_string(l.shape)}, {"size", l.size_m}});
    }
    json agents = json::array();
    for (const auto& a : m.agents) {
      json aj = {{"agent_id", a.agent_id}, {"kind", to_string(a.kind)}};
      aj["fix"] = a.fix ? fix_json(*a.fix) : json(nullptr);
      if (a.truth) {
        aj["truth"] = {{"x", a.truth->x}, {"y", a.truth->y}, {"z", a.truth->z}, {"yaw", a.truth->yaw}};
      }
      agents.push_back(std::move(aj));
    }
    return {{"type", "scene"}, {"lamps", lamps}, {"floor", floor_json(m.floor)}, {"agents", agents}};
  }
};

SceneSnapshot snapshot_from(const json& j) {
  SceneSnapshot s;
  const json& lamps = field(j, "lamps");
  if (!lamps.is_array()) malformed("'lamps' must be an array");
  for (const auto& l : lamps) {
    SnapshotLamp lamp;
    lamp.uid = static_cast<int>(integer(l, "uid"));
    lamp.x = number(l, "x");
    lamp.y = number(l, "y");
    const std::string shape = text(l, "shape");
    if (shape == "circle") {
      lamp.shape = LampShape::kCircle;
    } else if (shape == "square") {
      lamp.shape = LampShape::kSquare;
    } else {
      malformed("unknown shape '" + shape + "'");
    }
    lamp.size_m = number(l, "size");
    s.lamps.push_back(lamp);
  }
  const json& floor = field(j, "floor");
  s.floor = {number(floor, "x_min"), number(floor, "x_max"), number(floor, "y_min"), number(floor, "y_max")};
  const json& agents = field(j, "agents");
  if (!agents.is_array()) malformed("'agents' must be an array");
  for (const auto& a : agents) {
    SnapshotAgent agent;
    agent.agent_id = text(a, "agent_id");
    agent.kind = kind_of(a);
    if (auto it = a.find("fix"); it != a.end() && !it->is_null()) agent.fix = fix_from(*it);
    if (auto it = a.find("truth"); it != a.end() && !it->is_null()) {
      agent.truth = TruthState{number(*it, "x"), number(*it, "y"), number(*it, "z"), number(*it, "yaw")};
    }
    s.agents.push_back(std::move(agent));
  }
  return s;
}

}  // namespace

std::string to_string(ControlCommand cmd) {
  switch (cmd) {
    case ControlCommand::kPause: return "pause";
    case ControlCommand::kResume: return "resume";
    case ControlCommand::kFollowOn: return "follow_on";
    case ControlCommand::kFollowOff: return "follow_off";
    case ControlCommand::kScriptedOn: return "scripted_on";
    case ControlCommand::kScriptedOff: return "scripted_off";
  }
  return "pause";
}

std::string encode_message(const Message& msg) {
  // nlohmann objects keep keys sorted and print doubles with round-trip precision.
  return std::visit(Encoder{}, msg).dump() + "\n";
}

Message decode_message(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) malformed("not valid JSON");
  if (!j.is_object()) malformed("message must be a JSON object");
  try {
    const std::string type = text(j, "type");
    if (type == "fix") return fix_from(j);
    if (type == "diag") {
      return DiagMessage{text(j, "agent_id"), kind_of(j), integer(j, "t_ms"), text(j, "reason"),
                         j.contains("detail") ? text(j, "detail") : std::string()};
    }
    if (type == "goal") {
      NavGoal g{number(j, "x"), number(j, "y"), 0};
      if (j.contains("issued_t_ms")) g.issued_t_ms = integer(j, "issued_t_ms");
      return g;
    }
    if (type == "control") return ControlMessage{command_from(text(j, "command"))};
    if (type == "scene") return snapshot_from(j);
    malformed("unknown message type '" + type + "'");
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

}  // namespace vlp
