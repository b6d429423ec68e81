#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vlp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

/// Attitude as intrinsic Z-Y-X Euler angles (yaw, then pitch, then roll).
struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  bool operator==(const Attitude&) const = default;
};

/// World frame is right-handed with +z up. The camera looks along its own +z
/// axis, so a level camera (zero attitude) faces straight up.
struct Pose {
  Vec3 position = Vec3::Zero();
  Attitude orientation;

  bool operator==(const Pose& o) const {
    return position == o.position && orientation == o.orientation;
  }
};

/// Pinhole sensor with rolling-shutter timing.
struct CameraIntrinsics {
  double focal_px = 800.0;
  double cx = 319.5;
  double cy = 239.5;
  int width = 640;
  int height = 480;
  double t_row = 50e-6;  // row readout interval, seconds
  double t_exp = 50e-6;  // per-row exposure, seconds

  bool operator==(const CameraIntrinsics&) const = default;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

/// Body-to-world rotation Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rotation_matrix(const Attitude& att);

/// Ry(pitch) * Rx(roll): removes tilt but keeps the heading frame.
Mat3 tilt_matrix(double roll, double pitch);

Attitude attitude_from_matrix(const Mat3& r);

}  // namespace vlp
