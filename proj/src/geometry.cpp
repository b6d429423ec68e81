#include "vlp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vlp/error.hpp"

namespace vlp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kUnknownUid: return "UnknownUid";
    case ErrorCode::kNoSync: return "NoSync";
    case ErrorCode::kInvalidManchester: return "InvalidManchester";
    case ErrorCode::kDegenerateProfile: return "DegenerateProfile";
    case ErrorCode::kNeedMoreRows: return "NeedMoreRows";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kMissingYaw: return "MissingYaw";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kNoFix: return "NoFix";
    case ErrorCode::kMalformedMessage: return "MalformedMessage";
    case ErrorCode::kBind: return "BindError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

double normalize_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

Mat3 tilt_matrix(double roll, double pitch) {
  return (Eigen::AngleAxisd(pitch, Vec3::UnitY()) * Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

Mat3 rotation_matrix(const Attitude& att) {
  return Eigen::AngleAxisd(att.yaw, Vec3::UnitZ()).toRotationMatrix() *
         tilt_matrix(att.roll, att.pitch);
}

Attitude attitude_from_matrix(const Mat3& r) {
  Attitude att;
  att.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  att.roll = std::atan2(r(2, 1), r(2, 2));
  att.yaw = std::atan2(r(1, 0), r(0, 0));
  return att;
}

}  // namespace vlp
