#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vlp/geometry.hpp"

namespace vlp {

struct LedObservation {
  int uid = 0;
  Pixel centroid;
  double equiv_diameter_px = 0.0;
  Vec3 world = Vec3::Zero();
  double physical_diameter_m = 0.0;
};

struct ImuReading {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  bool yaw_trusted = false;
};

enum class Scheme { kSingleLed, kDoubleLed, kMultiLed };

std::string to_string(Scheme scheme);
/// Throws Error(kParse) for an unknown name.
Scheme scheme_from_string(const std::string& name);

struct PositionFix {
  std::string agent_id;
  double timestamp_s = 0.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  Attitude attitude;  // full attitude used or estimated by the scheme
  Scheme scheme = Scheme::kSingleLed;
  double residual_px = 0.0;
  int n_leds = 0;
  // Multi-LED diagnostics.
  int reference_uid = -1;
  int iterations = 0;
  std::vector<double> cost_history;  // summed squared error per accepted iterate
};

/// Six pose parameters: x, y, z, roll, pitch, yaw.
using PoseVector = Eigen::Matrix<double, 6, 1>;

/// Camera-frame ray through the pixel, rotated into the world frame.
Vec3 back_project(const CameraIntrinsics& k, const Attitude& attitude, const Pixel& pixel);

/// One lamp plus full attitude. With a known camera height the range follows
/// from the height difference; otherwise from apparent versus physical size.
/// Throws Error(kMissingYaw) or Error(kDegenerateGeometry).
PositionFix solve_single_led(const LedObservation& obs, const ImuReading& imu, const CameraIntrinsics& k,
                             std::optional<double> known_height = std::nullopt);

/// Two lamps plus roll/pitch; recovers yaw from the inter-lamp direction.
/// Throws Error(kDegenerateGeometry).
PositionFix solve_double_led(std::span<const LedObservation> obs, const ImuReading& imu,
                             const CameraIntrinsics& k, std::optional<double> known_height = std::nullopt);

/// Gauss-Newton over the full 6-DoF pose. Throws Error(kDegenerateGeometry)
/// for collinear lamps or Error(kNoConvergence).
PositionFix solve_multi_led(std::span<const LedObservation> obs, const CameraIntrinsics& k,
                            std::optional<Pose> initial_guess = std::nullopt);

/// Picks the scheme by lamp count and falls back to fewer lamps on failure.
/// Throws Error(kNoFix) when every applicable scheme fails.
PositionFix select_scheme(std::span<const LedObservation> obs, const ImuReading& imu,
                          const CameraIntrinsics& k, std::optional<double> known_height = std::nullopt);

/// Stacked (du, dv) reprojection errors, observed minus predicted.
Eigen::VectorXd reprojection_residuals(const PoseVector& pose, std::span<const LedObservation> obs,
                                       const CameraIntrinsics& k);

/// Central-difference Jacobian of reprojection_residuals.
Eigen::MatrixXd numeric_jacobian(const PoseVector& pose, std::span<const LedObservation> obs,
                                 const CameraIntrinsics& k, double step = 1e-6);

PoseVector to_pose_vector(const Pose& pose);
Pose from_pose_vector(const PoseVector& v);

}  // namespace vlp
