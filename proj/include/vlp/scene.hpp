#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vlp/geometry.hpp"

namespace vlp {

enum class LampShape { kCircle, kSquare };

struct LedLamp {
  int uid = 0;
  Vec3 center{0.0, 0.0, 2.5};
  LampShape shape = LampShape::kCircle;
  double size_m = 0.175;  // diameter for circles, side for squares
  double chip_rate = 2000.0;
  double radiance = 0.8;
  // False for a steady lamp that carries no data.
  bool modulated = true;

  /// Diameter of the circle with the same area as the lamp face.
  double equivalent_diameter() const;

  bool operator==(const LedLamp& o) const {
    return uid == o.uid && center == o.center && shape == o.shape && size_m == o.size_m &&
           chip_rate == o.chip_rate && radiance == o.radiance && modulated == o.modulated;
  }
};

struct LampRecord {
  Vec3 position;
  LampShape shape;
  double size_m;
};

class UidDatabase {
 public:
  UidDatabase() = default;
  explicit UidDatabase(const std::vector<LedLamp>& lamps);

  /// Throws Error(kValidation) on a duplicate uid.
  void add(int uid, const LampRecord& record);
  /// Throws Error(kUnknownUid).
  const LampRecord& lookup(int uid) const;
  bool contains(int uid) const { return records_.count(uid) != 0; }
  std::size_t size() const { return records_.size(); }

 private:
  std::map<int, LampRecord> records_;
};

enum class AgentKind { kSmartphone, kRobot };

struct Waypoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Waypoint&) const = default;
};

struct AgentState {
  std::string agent_id;
  AgentKind kind = AgentKind::kSmartphone;
  Pose pose;
  CameraIntrinsics camera;
  double imu_noise_sigma = 0.0;  // radians
  bool yaw_trusted = true;
  // Scripted target path for smartphones, piecewise linear in time.
  std::vector<Waypoint> trajectory;

  bool operator==(const AgentState&) const = default;
};

struct FloorBounds {
  double x_min = -2.0;
  double x_max = 2.0;
  double y_min = -2.0;
  double y_max = 2.0;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  bool operator==(const FloorBounds&) const = default;
};

struct NavParams {
  double v_max = 0.5;
  double omega_max = 1.5;
  double k_rho = 0.8;
  double k_alpha = 2.0;
  double stop_radius = 0.15;

  bool operator==(const NavParams&) const = default;
};

struct Scenario {
  std::vector<LedLamp> lamps;
  std::vector<AgentState> agents;
  double duration_s = 10.0;
  double frame_rate_hz = 30.0;
  double pixel_noise_sigma = 0.0;
  double ambient_level = 0.05;
  std::uint64_t rng_seed = 42;
  bool follow_mode = true;
  bool scripted_mode = true;
  FloorBounds floor;
  NavParams nav;

  bool operator==(const Scenario&) const = default;
};

inline constexpr double kRobotCameraHeight = 0.2;

/// The four-lamp layout used when a scenario omits `lamps`.
std::vector<LedLamp> default_lamps();
Scenario default_scenario();

/// Throws Error(kParse) on malformed input, Error(kValidation) on
/// constraint violations.
Scenario scenario_from_json(const nlohmann::json& doc);
/// Angles are written in degrees, like the input format.
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Throws Error(kIo) if the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

void validate(const Scenario& scenario);

std::string to_string(AgentKind kind);
std::string to_string(LampShape shape);

}  // namespace vlp
