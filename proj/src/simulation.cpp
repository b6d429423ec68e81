#include "vlp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "vlp/error.hpp"
#include "vlp/rs_camera.hpp"

namespace vlp {

namespace {

// Fixes older than this no longer steer the robot.
constexpr double kGoalStaleSeconds = 1.0;

void integrate_unicycle(double& x, double& y, double& yaw, const VelocityCommand& cmd, double dt) {
  if (std::abs(cmd.omega) < 1e-12) {
    x += cmd.v * std::cos(yaw) * dt;
    y += cmd.v * std::sin(yaw) * dt;
  } else {
    const double next = yaw + cmd.omega * dt;
    x += cmd.v / cmd.omega * (std::sin(next) - std::sin(yaw));
    y -= cmd.v / cmd.omega * (std::cos(next) - std::cos(yaw));
  }
  yaw = normalize_angle(yaw + cmd.omega * dt);
}

}  // namespace

VelocityCommand nav_step(const Pose& robot_pose, const NavGoal& goal, const NavParams& params) {
  const double dx = goal.x - robot_pose.position.x();
  const double dy = goal.y - robot_pose.position.y();
  const double rho = std::hypot(dx, dy);
  if (rho < params.stop_radius) return {};
  const double alpha = normalize_angle(std::atan2(dy, dx) - robot_pose.orientation.yaw);
  return {std::min(params.v_max, params.k_rho * rho) * std::max(0.0, std::cos(alpha)),
          std::clamp(params.k_alpha * alpha, -params.omega_max, params.omega_max)};
}

void write_metrics_header(std::ostream& out) {
  out << "t_ms,agent_id,truth_x,truth_y,truth_z,fix_x,fix_y,fix_z,err_m,scheme,residual_px,n_leds,decode_ok\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  const auto old_precision = out.precision(9);
  out << row.t_ms << ',' << row.agent_id << ',' << row.truth.x() << ',' << row.truth.y() << ','
      << row.truth.z() << ',';
  if (row.fix) {
    const Vec3& p = row.fix->position;
    out << p.x() << ',' << p.y() << ',' << p.z() << ',' << (p - row.truth).norm() << ','
        << to_string(row.fix->scheme) << ',' << row.fix->residual_px << ',' << row.fix->n_leds;
  } else {
    out << ",,,,,,";
  }
  out << ',' << (row.decode_ok ? 1 : 0) << '\n';
  out.precision(old_precision);
}

AgentPipelineResult AgentReceiver::process(const RsFrame& frame, const UidDatabase& db, const ImuReading& imu) {
  AgentPipelineResult result;
  const auto tracked = tracker_.update(frame, &db);
  result.rois = static_cast<int>(tracked.size());
  for (const auto& t : tracked) {
    if (!t.uid || t.roi.touches_border) continue;
    const LampRecord& rec = db.lookup(*t.uid);
    const double phys = rec.shape == LampShape::kCircle ? rec.size_m : 2.0 * rec.size_m / std::sqrt(std::numbers::pi);
    result.observations.push_back({*t.uid, t.roi.centroid, t.roi.equiv_diameter, rec.position, phys});
  }
  if (result.observations.empty()) {
    result.failure = result.rois == 0 ? "no lamps in view" : "no decoded lamps yet";
    return result;
  }
  std::optional<double> known_height;
  if (agent_.kind == AgentKind::kRobot) known_height = agent_.pose.position.z();
  try {
    result.fix = select_scheme(result.observations, imu, frame.intrinsics, known_height);
    result.fix->agent_id = agent_.agent_id;
    result.fix->timestamp_s = frame.t_start;
  } catch (const Error& e) {
    result.failure = e.what();
  }
  return result;
}

Simulation::Simulation(Scenario scenario) : scenario_(std::move(scenario)), db_(scenario_.lamps) {
  validate(scenario_);
  follow_ = scenario_.follow_mode;
  scripted_ = scenario_.scripted_mode;
  for (const auto& a : scenario_.agents) {
    AgentRuntime rt{a, AgentReceiver(a), std::nullopt, std::nullopt, a.pose.position.x(), a.pose.position.y(),
                    std::nullopt};
    scripted_target(rt, 0.0);
    agents_.push_back(std::move(rt));
  }
}

std::int64_t Simulation::t_ms() const {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(tick_) * 1000.0 / scenario_.frame_rate_hz));
}

Pose Simulation::truth_pose(const std::string& agent_id) const {
  for (const auto& a : agents_) {
    if (a.state.agent_id == agent_id) return a.state.pose;
  }
  throw Error(ErrorCode::kValidation, "no agent " + agent_id);
}

ImuReading Simulation::imu_for(const AgentRuntime& agent, std::size_t index) const {
  const Attitude& truth = agent.state.pose.orientation;
  ImuReading imu{truth.roll, truth.pitch, truth.yaw, agent.state.yaw_trusted};
  if (agent.state.imu_noise_sigma > 0.0) {
    const NoiseStream noise = NoiseStream::for_frame(scenario_.rng_seed ^ 0x494D55ull, index,
                                                     static_cast<std::uint64_t>(tick_));
    imu.roll += agent.state.imu_noise_sigma * noise.gaussian(0);
    imu.pitch += agent.state.imu_noise_sigma * noise.gaussian(1);
    imu.yaw = normalize_angle(imu.yaw + agent.state.imu_noise_sigma * noise.gaussian(2));
  }
  return imu;
}

void Simulation::scripted_target(AgentRuntime& agent, double t) const {
  const auto& traj = agent.state.trajectory;
  if (traj.empty()) return;
  if (t <= traj.front().t) {
    agent.target_x = traj.front().x;
    agent.target_y = traj.front().y;
    return;
  }
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (t <= traj[i].t) {
      const double span = traj[i].t - traj[i - 1].t;
      const double f = span > 0.0 ? (t - traj[i - 1].t) / span : 1.0;
      agent.target_x = traj[i - 1].x + f * (traj[i].x - traj[i - 1].x);
      agent.target_y = traj[i - 1].y + f * (traj[i].y - traj[i - 1].y);
      return;
    }
  }
  agent.target_x = traj.back().x;
  agent.target_y = traj.back().y;
}

std::vector<Message> Simulation::tick() {
  std::vector<Message> out;
  if (paused_) return out;
  const double t = static_cast<double>(tick_) / scenario_.frame_rate_hz;
  const std::int64_t now_ms = t_ms();
  last_metrics_.clear();

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    AgentRuntime& a = agents_[i];
    const NoiseStream noise = NoiseStream::for_frame(scenario_.rng_seed, i, static_cast<std::uint64_t>(tick_));
    const RsFrame frame = render_frame(scenario_, a.state, t, noise);
    const AgentPipelineResult res = a.receiver.process(frame, db_, imu_for(a, i));

    MetricsRow row{now_ms, a.state.agent_id, a.state.pose.position, res.fix, !res.observations.empty()};
    last_metrics_.push_back(row);

    if (res.fix) {
      const PositionFix& f = *res.fix;
      FixMessage msg{a.state.agent_id, a.state.kind, now_ms, f.position.x(), f.position.y(), f.position.z(),
                     f.yaw, f.scheme, f.residual_px, f.n_leds};
      a.last_fix = f;
      a.last_message = msg;
      if (a.state.kind == AgentKind::kRobot) a.estimate = Pose{f.position, {0.0, 0.0, f.yaw}};
      out.emplace_back(std::move(msg));
    } else {
      out.emplace_back(DiagMessage{a.state.agent_id, a.state.kind, now_ms, "NoFix", res.failure});
    }
  }

  // The robot pursues the smartphone's latest estimated position.
  robot_goal_.reset();
  if (follow_) {
    for (const auto& a : agents_) {
      if (a.state.kind != AgentKind::kSmartphone || !a.last_message) continue;
      if (now_ms - a.last_message->t_ms > static_cast<std::int64_t>(kGoalStaleSeconds * 1000.0)) continue;
      NavGoal g{a.last_message->x, a.last_message->y, a.last_message->t_ms};
      g.x = std::clamp(g.x, scenario_.floor.x_min, scenario_.floor.x_max);
      g.y = std::clamp(g.y, scenario_.floor.y_min, scenario_.floor.y_max);
      robot_goal_ = g;
      break;
    }
  }
  command_ = {};
  for (const auto& a : agents_) {
    if (a.state.kind == AgentKind::kRobot && a.estimate && robot_goal_) {
      command_ = nav_step(*a.estimate, *robot_goal_, scenario_.nav);
      break;
    }
  }

  advance(1.0 / scenario_.frame_rate_hz);
  ++tick_;
  return out;
}

void Simulation::advance(double dt) {
  const double t_next = static_cast<double>(tick_ + 1) / scenario_.frame_rate_hz;
  const double blend = 1.0 - std::exp(-dt / kSmartphoneLagSeconds);
  for (auto& a : agents_) {
    Vec3& p = a.state.pose.position;
    if (a.state.kind == AgentKind::kRobot) {
      double yaw = a.state.pose.orientation.yaw;
      integrate_unicycle(p.x(), p.y(), yaw, command_, dt);
      a.state.pose.orientation.yaw = yaw;
      if (a.estimate) {
        double eyaw = a.estimate->orientation.yaw;
        integrate_unicycle(a.estimate->position.x(), a.estimate->position.y(), eyaw, command_, dt);
        a.estimate->orientation.yaw = eyaw;
      }
      continue;
    }
    if (scripted_) {
      scripted_target(a, t_next);
    } else if (console_goal_) {
      a.target_x = console_goal_->x;
      a.target_y = console_goal_->y;
    }
    p.x() += blend * (a.target_x - p.x());
    p.y() += blend * (a.target_y - p.y());
  }
}

void Simulation::apply(const Message& msg) {
  if (const auto* goal = std::get_if<NavGoal>(&msg)) {
    NavGoal g = *goal;
    g.x = std::clamp(g.x, scenario_.floor.x_min, scenario_.floor.x_max);
    g.y = std::clamp(g.y, scenario_.floor.y_min, scenario_.floor.y_max);
    console_goal_ = g;  // last writer wins
    return;
  }
  if (const auto* ctl = std::get_if<ControlMessage>(&msg)) {
    switch (ctl->command) {
      case ControlCommand::kPause: paused_ = true; break;
      case ControlCommand::kResume: paused_ = false; break;
      case ControlCommand::kFollowOn: follow_ = true; break;
      case ControlCommand::kFollowOff: follow_ = false; break;
      case ControlCommand::kScriptedOn: scripted_ = true; break;
      case ControlCommand::kScriptedOff: scripted_ = false; break;
    }
  }
}

SceneSnapshot Simulation::snapshot(bool include_truth) const {
  SceneSnapshot s;
  for (const auto& l : scenario_.lamps) {
    s.lamps.push_back({l.uid, l.center.x(), l.center.y(), l.shape, l.size_m});
  }
  s.floor = scenario_.floor;
  for (const auto& a : agents_) {
    SnapshotAgent sa{a.state.agent_id, a.state.kind, a.last_message, std::nullopt};
    if (include_truth) {
      const Vec3& p = a.state.pose.position;
      sa.truth = TruthState{p.x(), p.y(), p.z(), a.state.pose.orientation.yaw};
    }
    s.agents.push_back(std::move(sa));
  }
  return s;
}

}  // namespace vlp
