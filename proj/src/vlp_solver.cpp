#include "vlp/vlp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "vlp/error.hpp"

namespace vlp {

namespace {

constexpr double kMinRayElevation = 0.05;  // d_z below this is "near the horizon"
constexpr double kMinSeparationPx = 10.0;
constexpr int kMaxIterations = 50;
constexpr int kMaxHalvings = 10;
constexpr double kStepTolerance = 1e-9;
constexpr double kMaxResidualPx = 5.0;

Vec3 camera_ray(const CameraIntrinsics& k, const Pixel& p) {
  return Vec3((p.u - k.cx) / k.focal_px, (p.v - k.cy) / k.focal_px, 1.0).normalized();
}

Pixel project(const Vec3& cam_pos, const Mat3& r, const CameraIntrinsics& k, const Vec3& world) {
  const Vec3 p = r.transpose() * (world - cam_pos);
  // Keep the model finite for points that slip behind the camera mid-iteration.
  const double z = std::max(p.z(), 1e-9);
  return {k.cx + k.focal_px * p.x() / z, k.cy + k.focal_px * p.y() / z};
}

double rms_reprojection(const Vec3& cam_pos, const Attitude& att, const CameraIntrinsics& k,
                        std::span<const LedObservation> obs) {
  const Mat3 r = rotation_matrix(att);
  double sq = 0.0;
  for (const auto& o : obs) {
    const Pixel p = project(cam_pos, r, k, o.world);
    sq += (p.u - o.centroid.u) * (p.u - o.centroid.u) + (p.v - o.centroid.v) * (p.v - o.centroid.v);
  }
  return std::sqrt(sq / static_cast<double>(obs.size()));
}

double pixel_distance(const Pixel& a, const Pixel& b) { return std::hypot(a.u - b.u, a.v - b.v); }

bool collinear(std::span<const LedObservation> obs) {
  Vec3 mean = Vec3::Zero();
  for (const auto& o : obs) mean += o.world;
  mean /= static_cast<double>(obs.size());
  Eigen::MatrixXd centered(3, obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = obs[i].world - mean;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto s = svd.singularValues();
  return s.size() < 2 || s[1] <= 1e-6 * std::max(1.0, s[0]);
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSingleLed: return "SingleLed";
    case Scheme::kDoubleLed: return "DoubleLed";
    case Scheme::kMultiLed: return "MultiLed";
  }
  return "SingleLed";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "SingleLed") return Scheme::kSingleLed;
  if (name == "DoubleLed") return Scheme::kDoubleLed;
  if (name == "MultiLed") return Scheme::kMultiLed;
  throw Error(ErrorCode::kParse, "unknown scheme '" + name + "'");
}

PoseVector to_pose_vector(const Pose& pose) {
  PoseVector v;
  v << pose.position, pose.orientation.roll, pose.orientation.pitch, pose.orientation.yaw;
  return v;
}

Pose from_pose_vector(const PoseVector& v) {
  return {v.head<3>(), {v[3], v[4], v[5]}};
}

Vec3 back_project(const CameraIntrinsics& k, const Attitude& attitude, const Pixel& pixel) {
  return rotation_matrix(attitude) * camera_ray(k, pixel);
}

PositionFix solve_single_led(const LedObservation& obs, const ImuReading& imu, const CameraIntrinsics& k,
                             std::optional<double> known_height) {
  if (!imu.yaw_trusted) throw Error(ErrorCode::kMissingYaw, "single-LED fix needs a trusted yaw");
  const Attitude att{imu.roll, imu.pitch, imu.yaw};
  const Vec3 d = back_project(k, att, obs.centroid);
  if (d.z() <= kMinRayElevation) {
    throw Error(ErrorCode::kDegenerateGeometry, "lamp ray too close to the horizon");
  }

  double range;
  if (known_height) {
    range = (obs.world.z() - *known_height) / d.z();
  } else {
    if (!(obs.equiv_diameter_px > 0.0) || !(obs.physical_diameter_m > 0.0)) {
      throw Error(ErrorCode::kDegenerateGeometry, "no apparent size for range-from-scale");
    }
    // Apparent size scales with depth along the optical axis, not slant range.
    const Vec3 axis = rotation_matrix(att).col(2);
    const double cos_off_axis = d.dot(axis);
    range = k.focal_px * obs.physical_diameter_m / obs.equiv_diameter_px / cos_off_axis;
  }

  PositionFix fix;
  fix.position = obs.world - range * d;
  fix.yaw = normalize_angle(att.yaw);
  fix.attitude = att;
  fix.scheme = Scheme::kSingleLed;
  fix.n_leds = 1;
  fix.reference_uid = obs.uid;
  const LedObservation one[] = {obs};
  fix.residual_px = rms_reprojection(fix.position, att, k, one);
  return fix;
}

PositionFix solve_double_led(std::span<const LedObservation> obs, const ImuReading& imu,
                             const CameraIntrinsics& k, std::optional<double> known_height) {
  if (obs.size() != 2) throw Error(ErrorCode::kDegenerateGeometry, "double-LED scheme needs 2 lamps");
  if (obs[0].uid == obs[1].uid) throw Error(ErrorCode::kDegenerateGeometry, "duplicate lamp uid");
  if (pixel_distance(obs[0].centroid, obs[1].centroid) < kMinSeparationPx) {
    throw Error(ErrorCode::kDegenerateGeometry, "lamps less than 10 px apart in the image");
  }

  // Rays in the gravity-aligned, heading-unknown frame.
  const Mat3 tilt = tilt_matrix(imu.roll, imu.pitch);
  const Vec3 g1 = tilt * camera_ray(k, obs[0].centroid);
  const Vec3 g2 = tilt * camera_ray(k, obs[1].centroid);
  if (g1.z() <= kMinRayElevation || g2.z() <= kMinRayElevation) {
    throw Error(ErrorCode::kDegenerateGeometry, "lamp ray too close to the horizon");
  }
  const Eigen::Vector2d a1 = g1.head<2>() / g1.z();
  const Eigen::Vector2d a2 = g2.head<2>() / g2.z();
  const Vec3& w1 = obs[0].world;
  const Vec3& w2 = obs[1].world;
  const Eigen::Vector2d dw = (w2 - w1).head<2>();
  if (dw.norm() < 1e-9) throw Error(ErrorCode::kDegenerateGeometry, "lamps share a vertical line");

  // Horizontal image-side separation as a function of camera height c_z:
  // m(c_z) = (w2z - c_z) a2 - (w1z - c_z) a1 = p - c_z q.
  const Eigen::Vector2d p = w2.z() * a2 - w1.z() * a1;
  const Eigen::Vector2d q = a2 - a1;
  if (q.norm() < 1e-12) throw Error(ErrorCode::kDegenerateGeometry, "rays are parallel");

  double cam_z;
  if (known_height) {
    cam_z = *known_height;
  } else {
    const double qa = q.squaredNorm();
    const double qb = -2.0 * p.dot(q);
    const double qc = p.squaredNorm() - dw.squaredNorm();
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) throw Error(ErrorCode::kDegenerateGeometry, "inconsistent lamp separation");
    const double s = std::sqrt(disc);
    const double roots[2] = {(-qb + s) / (2.0 * qa), (-qb - s) / (2.0 * qa)};
    const double ceiling = std::min(w1.z(), w2.z());
    double chosen = std::numeric_limits<double>::quiet_NaN();
    for (double r : roots) {
      if (r < ceiling && (std::isnan(chosen) || r > chosen)) chosen = r;
    }
    if (std::isnan(chosen)) throw Error(ErrorCode::kDegenerateGeometry, "camera not below the lamps");
    cam_z = chosen;
  }
  const Eigen::Vector2d m = p - cam_z * q;
  if (m.norm() < 1e-12) throw Error(ErrorCode::kDegenerateGeometry, "zero image-side baseline");
  const double yaw = normalize_angle(std::atan2(dw.y(), dw.x()) - std::atan2(m.y(), m.x()));

  const Attitude att{imu.roll, imu.pitch, yaw};
  const Mat3 r = rotation_matrix(att);
  const Vec3 d1 = r * camera_ray(k, obs[0].centroid);
  const Vec3 d2 = r * camera_ray(k, obs[1].centroid);
  if (d1.cross(d2).norm() < 1e-9) throw Error(ErrorCode::kDegenerateGeometry, "rays are parallel");

  // Least-squares point closest to both world rays.
  const Mat3 p1 = Mat3::Identity() - d1 * d1.transpose();
  const Mat3 p2 = Mat3::Identity() - d2 * d2.transpose();
  const Vec3 position = (p1 + p2).ldlt().solve(p1 * w1 + p2 * w2);

  PositionFix fix;
  fix.position = position;
  fix.yaw = yaw;
  fix.attitude = att;
  fix.scheme = Scheme::kDoubleLed;
  fix.n_leds = 2;
  fix.reference_uid = std::min(obs[0].uid, obs[1].uid);
  fix.residual_px = rms_reprojection(position, att, k, obs);
  return fix;
}

Eigen::VectorXd reprojection_residuals(const PoseVector& pose, std::span<const LedObservation> obs,
                                       const CameraIntrinsics& k) {
  const Vec3 pos = pose.head<3>();
  const Mat3 r = rotation_matrix({pose[3], pose[4], pose[5]});
  Eigen::VectorXd res(2 * static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Pixel p = project(pos, r, k, obs[i].world);
    res[2 * static_cast<Eigen::Index>(i)] = obs[i].centroid.u - p.u;
    res[2 * static_cast<Eigen::Index>(i) + 1] = obs[i].centroid.v - p.v;
  }
  return res;
}

Eigen::MatrixXd numeric_jacobian(const PoseVector& pose, std::span<const LedObservation> obs,
                                 const CameraIntrinsics& k, double step) {
  Eigen::MatrixXd jac(2 * static_cast<Eigen::Index>(obs.size()), 6);
  for (int j = 0; j < 6; ++j) {
    PoseVector plus = pose, minus = pose;
    plus[j] += step;
    minus[j] -= step;
    jac.col(j) = (reprojection_residuals(plus, obs, k) - reprojection_residuals(minus, obs, k)) / (2.0 * step);
  }
  return jac;
}

PositionFix solve_multi_led(std::span<const LedObservation> obs, const CameraIntrinsics& k,
                            std::optional<Pose> initial_guess) {
  if (obs.size() < 3) throw Error(ErrorCode::kDegenerateGeometry, "multi-LED scheme needs 3 or more lamps");
  if (collinear(obs)) throw Error(ErrorCode::kDegenerateGeometry, "lamps are collinear");

  // The lowest uid is the reference lamp; the pose is solved relative to it.
  const auto ref = std::min_element(obs.begin(), obs.end(),
                                    [](const auto& a, const auto& b) { return a.uid < b.uid; });
  const Vec3 anchor = ref->world;
  std::vector<LedObservation> rel(obs.begin(), obs.end());
  for (auto& o : rel) o.world -= anchor;

  Pose guess;
  if (initial_guess) {
    guess = *initial_guess;
  } else {
    // Widest-separated pair, level attitude.
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t j = i + 1; j < obs.size(); ++j) {
        const double d = (obs[i].world - obs[j].world).norm();
        if (d > best) best = d, bi = i, bj = j;
      }
    }
    const LedObservation pair[] = {obs[bi], obs[bj]};
    try {
      const PositionFix seed = solve_double_led(pair, ImuReading{}, k);
      guess.position = seed.position;
      guess.orientation = {0.0, 0.0, seed.yaw};
    } catch (const Error&) {
      Vec3 mean = Vec3::Zero();
      for (const auto& o : obs) mean += o.world;
      mean /= static_cast<double>(obs.size());
      guess.position = mean - Vec3(0.0, 0.0, 1.5);
    }
  }
  guess.position -= anchor;

  PoseVector x = to_pose_vector(guess);
  Eigen::VectorXd r = reprojection_residuals(x, rel, k);
  double cost = r.squaredNorm();
  PositionFix fix;
  fix.cost_history.push_back(cost);

  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const Eigen::MatrixXd jac = numeric_jacobian(x, rel, k);
    // Residual is observed - predicted, so J here is -d(pred)/dx.
    const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
    const PoseVector delta = -jtj.ldlt().solve(jac.transpose() * r);
    if (!delta.allFinite()) break;

    double alpha = 1.0;
    bool accepted = false;
    PoseVector trial;
    Eigen::VectorXd trial_r;
    for (int h = 0; h <= kMaxHalvings; ++h, alpha *= 0.5) {
      trial = x + alpha * delta;
      trial_r = reprojection_residuals(trial, rel, k);
      if (trial_r.squaredNorm() <= cost) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double step_norm = (alpha * delta).norm();
    x = trial;
    r = trial_r;
    cost = r.squaredNorm();
    fix.cost_history.push_back(cost);
    if (step_norm < kStepTolerance) {
      ++it;
      break;
    }
  }

  fix.iterations = it;
  fix.residual_px = std::sqrt(cost / static_cast<double>(obs.size()));
  if (fix.residual_px > kMaxResidualPx) {
    throw Error(ErrorCode::kNoConvergence,
                "RMS reprojection " + std::to_string(fix.residual_px) + " px after " + std::to_string(it) +
                    " iterations");
  }
  const Pose solved = from_pose_vector(x);
  fix.position = solved.position + anchor;
  fix.attitude = {normalize_angle(solved.orientation.roll), normalize_angle(solved.orientation.pitch),
                  normalize_angle(solved.orientation.yaw)};
  fix.yaw = fix.attitude.yaw;
  fix.scheme = Scheme::kMultiLed;
  fix.n_leds = static_cast<int>(obs.size());
  fix.reference_uid = ref->uid;
  return fix;
}

PositionFix select_scheme(std::span<const LedObservation> obs, const ImuReading& imu,
                          const CameraIntrinsics& k, std::optional<double> known_height) {
  if (obs.empty()) throw Error(ErrorCode::kNoFix, "no decoded lamps");
  std::string reasons;
  auto note = [&reasons](const Error& e) {
    if (!reasons.empty()) reasons += "; ";
    reasons += e.what();
  };

  // Pair with the widest image separation, for the double-LED fallback.
  auto widest_pair = [&obs]() {
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t j = i + 1; j < obs.size(); ++j) {
        const double d = pixel_distance(obs[i].centroid, obs[j].centroid);
        if (d > best) best = d, bi = i, bj = j;
      }
    }
    return std::array<LedObservation, 2>{obs[bi], obs[bj]};
  };

  if (obs.size() >= 3) {
    try {
      std::optional<Pose> guess;
      try {
        const auto pair = widest_pair();
        const PositionFix seed = solve_double_led(pair, imu, k, known_height);
        guess = Pose{seed.position, seed.attitude};
      } catch (const Error&) {
      }
      return solve_multi_led(obs, k, guess);
    } catch (const Error& e) {
      note(e);
    }
  }
  if (obs.size() >= 2) {
    try {
      const auto pair = widest_pair();
      return solve_double_led(pair, imu, k, known_height);
    } catch (const Error& e) {
      note(e);
    }
  }
  // Most central lamp has the best-conditioned single-LED geometry.
  const auto central = std::min_element(obs.begin(), obs.end(), [&k](const auto& a, const auto& b) {
    return std::hypot(a.centroid.u - k.cx, a.centroid.v - k.cy) <
           std::hypot(b.centroid.u - k.cx, b.centroid.v - k.cy);
  });
  try {
    return solve_single_led(*central, imu, k, known_height);
  } catch (const Error& e) {
    note(e);
  }
  throw Error(ErrorCode::kNoFix, reasons);
}

}  // namespace vlp
