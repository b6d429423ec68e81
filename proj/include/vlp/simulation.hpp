#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vlp/protocol.hpp"
#include "vlp/scene.hpp"
#include "vlp/vision.hpp"
#include "vlp/vlp_solver.hpp"

namespace vlp {

struct VelocityCommand {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s

  bool operator==(const VelocityCommand&) const = default;
};

/// Go-to-goal law for a unicycle: stop inside the radius, otherwise drive
/// forward only when facing the goal and turn proportionally to bearing error.
VelocityCommand nav_step(const Pose& robot_pose, const NavGoal& goal, const NavParams& params);

/// One line of metrics.csv.
struct MetricsRow {
  std::int64_t t_ms = 0;
  std::string agent_id;
  Vec3 truth = Vec3::Zero();
  std::optional<PositionFix> fix;
  bool decode_ok = false;
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);

/// Per-agent receiver: rolling-shutter frame -> tracked lamps -> fix.
struct AgentPipelineResult {
  std::vector<LedObservation> observations;
  int rois = 0;
  std::optional<PositionFix> fix;
  std::string failure;  // set when fix is empty
};

class AgentReceiver {
 public:
  AgentReceiver(const AgentState& agent, VisionConfig config = {}) : agent_(agent), tracker_(config) {}

  AgentPipelineResult process(const RsFrame& frame, const UidDatabase& db, const ImuReading& imu);

 private:
  AgentState agent_;
  LampTracker tracker_;
};

/// The authoritative simulation loop. Not thread-safe; one owner drives it.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);

  /// Runs one frame period: renders, positions and publishes one fix or
  /// diagnostic per agent, then advances ground truth by 1/frame_rate.
  std::vector<Message> tick();

  /// Applies a goal or control message received from a client.
  void apply(const Message& msg);

  SceneSnapshot snapshot(bool include_truth = false) const;

  const Scenario& scenario() const { return scenario_; }
  std::int64_t tick_index() const { return tick_; }
  std::int64_t t_ms() const;
  bool paused() const { return paused_; }
  bool follow_mode() const { return follow_; }
  bool scripted_mode() const { return scripted_; }

  const std::vector<MetricsRow>& last_metrics() const { return last_metrics_; }
  Pose truth_pose(const std::string& agent_id) const;
  std::optional<NavGoal> robot_goal() const { return robot_goal_; }
  VelocityCommand robot_command() const { return command_; }

 private:
  struct AgentRuntime {
    AgentState state;
    AgentReceiver receiver;
    std::optional<PositionFix> last_fix;
    std::optional<FixMessage> last_message;
    // Smartphone target (scripted path or console goal).
    double target_x = 0.0, target_y = 0.0;
    // Robot pose estimate dead-reckoned from the last fix by the commands sent.
    std::optional<Pose> estimate;
  };

  ImuReading imu_for(const AgentRuntime& agent, std::size_t index) const;
  void advance(double dt);
  void scripted_target(AgentRuntime& agent, double t) const;

  Scenario scenario_;
  UidDatabase db_;
  std::vector<AgentRuntime> agents_;
  std::int64_t tick_ = 0;
  bool paused_ = false;
  bool follow_ = true;
  bool scripted_ = true;
  std::optional<NavGoal> console_goal_;
  std::optional<NavGoal> robot_goal_;
  VelocityCommand command_;
  std::vector<MetricsRow> last_metrics_;
};

inline constexpr double kSmartphoneLagSeconds = 0.3;

}  // namespace vlp
