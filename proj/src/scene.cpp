#include "vlp/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "vlp/error.hpp"

namespace vlp {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return it->get<T>();
}

LampShape parse_shape(const std::string& s) {
  if (s == "circle") return LampShape::kCircle;
  if (s == "square") return LampShape::kSquare;
  throw Error(ErrorCode::kParse, "unknown lamp shape '" + s + "'");
}

AgentKind parse_kind(const std::string& s) {
  if (s == "smartphone") return AgentKind::kSmartphone;
  if (s == "robot") return AgentKind::kRobot;
  throw Error(ErrorCode::kParse, "unknown agent kind '" + s + "'");
}

LedLamp lamp_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "lamp entry must be an object");
  LedLamp lamp;
  if (!j.contains("uid")) throw Error(ErrorCode::kParse, "lamp without uid");
  lamp.uid = j.at("uid").get<int>();
  lamp.center = {get_or(j, "x", 0.0), get_or(j, "y", 0.0), get_or(j, "z", 2.5)};
  lamp.shape = parse_shape(get_or<std::string>(j, "shape", "circle"));
  const char* size_key = lamp.shape == LampShape::kCircle ? "diameter" : "side";
  lamp.size_m = get_or(j, size_key, 0.175);
  lamp.chip_rate = get_or(j, "chip_rate", 2000.0);
  lamp.radiance = get_or(j, "radiance", 0.8);
  lamp.modulated = get_or(j, "modulated", true);
  return lamp;
}

json lamp_to_json(const LedLamp& lamp) {
  json j = {{"uid", lamp.uid},
            {"x", lamp.center.x()},
            {"y", lamp.center.y()},
            {"z", lamp.center.z()},
            {"shape", to_string(lamp.shape)},
            {"chip_rate", lamp.chip_rate},
            {"radiance", lamp.radiance},
            {"modulated", lamp.modulated}};
  j[lamp.shape == LampShape::kCircle ? "diameter" : "side"] = lamp.size_m;
  return j;
}

CameraIntrinsics camera_from_json(const json& j) {
  CameraIntrinsics cam;
  cam.width = get_or(j, "width", cam.width);
  cam.height = get_or(j, "height", cam.height);
  cam.focal_px = get_or(j, "focal_px", cam.focal_px);
  // The principal point defaults to the image center for whatever size was given.
  cam.cx = get_or(j, "cx", (cam.width - 1) / 2.0);
  cam.cy = get_or(j, "cy", (cam.height - 1) / 2.0);
  cam.t_row = get_or(j, "t_row", cam.t_row);
  cam.t_exp = get_or(j, "t_exp", cam.t_exp);
  return cam;
}

json camera_to_json(const CameraIntrinsics& cam) {
  return {{"width", cam.width}, {"height", cam.height}, {"focal_px", cam.focal_px},
          {"cx", cam.cx},       {"cy", cam.cy},         {"t_row", cam.t_row},
          {"t_exp", cam.t_exp}};
}

AgentState agent_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "agent entry must be an object");
  AgentState agent;
  agent.agent_id = get_or<std::string>(j, "id", "");
  agent.kind = parse_kind(get_or<std::string>(j, "kind", "smartphone"));
  const bool robot = agent.kind == AgentKind::kRobot;
  agent.pose.position = {get_or(j, "x", 0.0), get_or(j, "y", 0.0),
                         get_or(j, "z", robot ? kRobotCameraHeight : 1.0)};
  agent.pose.orientation.roll = normalize_angle(get_or(j, "roll", 0.0) * kDegToRad);
  agent.pose.orientation.pitch = normalize_angle(get_or(j, "pitch", 0.0) * kDegToRad);
  agent.pose.orientation.yaw = normalize_angle(get_or(j, "yaw", 0.0) * kDegToRad);
  agent.imu_noise_sigma = get_or(j, "imu_noise_sigma", 0.0) * kDegToRad;
  agent.yaw_trusted = get_or(j, "yaw_trusted", true);
  agent.camera = camera_from_json(j.value("camera", json::object()));
  if (auto it = j.find("trajectory"); it != j.end()) {
    for (const auto& w : *it) {
      agent.trajectory.push_back({w.at("t").get<double>(), w.at("x").get<double>(),
                                  w.at("y").get<double>()});
    }
  }
  return agent;
}

json agent_to_json(const AgentState& a) {
  json j = {{"id", a.agent_id},
            {"kind", to_string(a.kind)},
            {"x", a.pose.position.x()},
            {"y", a.pose.position.y()},
            {"z", a.pose.position.z()},
            {"roll", a.pose.orientation.roll * kRadToDeg},
            {"pitch", a.pose.orientation.pitch * kRadToDeg},
            {"yaw", a.pose.orientation.yaw * kRadToDeg},
            {"imu_noise_sigma", a.imu_noise_sigma * kRadToDeg},
            {"yaw_trusted", a.yaw_trusted},
            {"camera", camera_to_json(a.camera)}};
  if (!a.trajectory.empty()) {
    json traj = json::array();
    for (const auto& w : a.trajectory) traj.push_back({{"t", w.t}, {"x", w.x}, {"y", w.y}});
    j["trajectory"] = std::move(traj);
  }
  return j;
}

std::vector<AgentState> default_agents() {
  AgentState robot;
  robot.agent_id = "robot";
  robot.kind = AgentKind::kRobot;
  // 3 m from the smartphone along the lamp-grid diagonal.
  const double offset = 3.0 / std::numbers::sqrt2;
  robot.pose.position = {1.0 - offset, 1.0 - offset, kRobotCameraHeight};
  robot.pose.orientation.yaw = 0.0;

  AgentState phone;
  phone.agent_id = "phone";
  phone.kind = AgentKind::kSmartphone;
  phone.pose.position = {1.0, 1.0, 1.0};
  return {robot, phone};
}

void check(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kValidation, what);
}

}  // namespace

double LedLamp::equivalent_diameter() const {
  if (shape == LampShape::kCircle) return size_m;
  return 2.0 * size_m / std::sqrt(std::numbers::pi);
}

UidDatabase::UidDatabase(const std::vector<LedLamp>& lamps) {
  for (const auto& lamp : lamps) add(lamp.uid, {lamp.center, lamp.shape, lamp.size_m});
}

void UidDatabase::add(int uid, const LampRecord& record) {
  if (!records_.emplace(uid, record).second) {
    throw Error(ErrorCode::kValidation, "duplicate uid " + std::to_string(uid));
  }
}

const LampRecord& UidDatabase::lookup(int uid) const {
  auto it = records_.find(uid);
  if (it == records_.end()) {
    throw Error(ErrorCode::kUnknownUid, "uid " + std::to_string(uid) + " not in database");
  }
  return it->second;
}

std::string to_string(AgentKind kind) {
  return kind == AgentKind::kRobot ? "robot" : "smartphone";
}

std::string to_string(LampShape shape) {
  return shape == LampShape::kCircle ? "circle" : "square";
}

std::vector<LedLamp> default_lamps() {
  std::vector<LedLamp> lamps;
  const double xs[] = {-1.0, 1.0, -1.0, 1.0};
  const double ys[] = {-1.0, -1.0, 1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    LedLamp lamp;
    lamp.uid = i + 1;
    lamp.center = {xs[i], ys[i], 2.5};
    lamps.push_back(lamp);
  }
  return lamps;
}

Scenario default_scenario() {
  Scenario s;
  s.lamps = default_lamps();
  s.agents = default_agents();
  return s;
}

void validate(const Scenario& s) {
  check(!s.lamps.empty(), "scenario needs at least one lamp");
  check(!s.agents.empty(), "scenario needs at least one agent");
  check(s.frame_rate_hz > 0.0, "frame_rate_hz must be positive");
  check(s.duration_s >= 0.0, "duration_s must be non-negative");
  check(s.pixel_noise_sigma >= 0.0, "pixel_noise_sigma must be non-negative");
  check(s.ambient_level >= 0.0 && s.ambient_level <= 1.0, "ambient_level must be in [0,1]");
  check(s.floor.x_min < s.floor.x_max && s.floor.y_min < s.floor.y_max, "empty floor bounds");
  check(s.nav.stop_radius > 0.0 && s.nav.v_max > 0.0 && s.nav.omega_max > 0.0,
        "nav limits must be positive");

  std::set<int> uids;
  for (const auto& lamp : s.lamps) {
    check(lamp.uid >= 0 && lamp.uid <= 255, "uid out of range: " + std::to_string(lamp.uid));
    check(uids.insert(lamp.uid).second, "duplicate uid " + std::to_string(lamp.uid));
    check(lamp.size_m > 0.0, "lamp size must be positive");
    check(lamp.chip_rate > 0.0, "chip_rate must be positive");
    check(lamp.center.z() > 0.0, "lamp z must be positive");
    check(lamp.radiance > 0.0 && lamp.radiance <= 1.0, "radiance must be in (0,1]");
  }

  std::set<std::string> ids;
  for (const auto& a : s.agents) {
    check(!a.agent_id.empty(), "agent without id");
    check(ids.insert(a.agent_id).second, "duplicate agent id " + a.agent_id);
    const auto& cam = a.camera;
    check(cam.focal_px > 0.0 && cam.t_row > 0.0 && cam.t_exp > 0.0, "camera parameters must be positive");
    check(cam.width > 0 && cam.height > 0, "camera size must be positive");
    check(cam.t_exp <= cam.height * cam.t_row, "t_exp exceeds frame readout");
    check(a.imu_noise_sigma >= 0.0, "imu_noise_sigma must be non-negative");
    if (a.kind == AgentKind::kRobot) {
      check(a.pose.orientation.roll == 0.0 && a.pose.orientation.pitch == 0.0,
            "robot camera must face straight up");
    }
    for (std::size_t i = 1; i < a.trajectory.size(); ++i) {
      check(a.trajectory[i].t >= a.trajectory[i - 1].t, "trajectory times must be ordered");
    }
  }
}

Scenario scenario_from_json(const json& doc) {
  Scenario s;
  try {
    if (!doc.is_object()) throw Error(ErrorCode::kParse, "scenario must be a JSON object");
    if (auto it = doc.find("lamps"); it != doc.end()) {
      for (const auto& l : *it) s.lamps.push_back(lamp_from_json(l));
    } else {
      s.lamps = default_lamps();
    }
    if (auto it = doc.find("agents"); it != doc.end()) {
      for (const auto& a : *it) s.agents.push_back(agent_from_json(a));
    } else {
      s.agents = default_agents();
    }
    const json sim = doc.value("sim", json::object());
    s.duration_s = get_or(sim, "duration_s", s.duration_s);
    s.frame_rate_hz = get_or(sim, "frame_rate_hz", s.frame_rate_hz);
    s.pixel_noise_sigma = get_or(sim, "pixel_noise_sigma", s.pixel_noise_sigma);
    s.ambient_level = get_or(sim, "ambient_level", s.ambient_level);
    s.rng_seed = get_or<std::uint64_t>(sim, "rng_seed", s.rng_seed);
    s.follow_mode = get_or(sim, "follow_mode", s.follow_mode);
    s.scripted_mode = get_or(sim, "scripted_mode", s.scripted_mode);
    const json floor = sim.value("floor", json::object());
    s.floor.x_min = get_or(floor, "x_min", s.floor.x_min);
    s.floor.x_max = get_or(floor, "x_max", s.floor.x_max);
    s.floor.y_min = get_or(floor, "y_min", s.floor.y_min);
    s.floor.y_max = get_or(floor, "y_max", s.floor.y_max);
    const json nav = sim.value("nav", json::object());
    s.nav.v_max = get_or(nav, "v_max", s.nav.v_max);
    s.nav.omega_max = get_or(nav, "omega_max", s.nav.omega_max);
    s.nav.k_rho = get_or(nav, "k_rho", s.nav.k_rho);
    s.nav.k_alpha = get_or(nav, "k_alpha", s.nav.k_alpha);
    s.nav.stop_radius = get_or(nav, "stop_radius", s.nav.stop_radius);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  validate(s);
  return s;
}

json scenario_to_json(const Scenario& s) {
  json lamps = json::array();
  for (const auto& l : s.lamps) lamps.push_back(lamp_to_json(l));
  json agents = json::array();
  for (const auto& a : s.agents) agents.push_back(agent_to_json(a));
  json sim = {{"duration_s", s.duration_s},
              {"frame_rate_hz", s.frame_rate_hz},
              {"pixel_noise_sigma", s.pixel_noise_sigma},
              {"ambient_level", s.ambient_level},
              {"rng_seed", s.rng_seed},
              {"follow_mode", s.follow_mode},
              {"scripted_mode", s.scripted_mode},
              {"floor",
               {{"x_min", s.floor.x_min},
                {"x_max", s.floor.x_max},
                {"y_min", s.floor.y_min},
                {"y_max", s.floor.y_max}}},
              {"nav",
               {{"v_max", s.nav.v_max},
                {"omega_max", s.nav.omega_max},
                {"k_rho", s.nav.k_rho},
                {"k_alpha", s.nav.k_alpha},
                {"stop_radius", s.nav.stop_radius}}}};
  return {{"lamps", lamps}, {"agents", agents}, {"sim", sim}};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

}  // namespace vlp
