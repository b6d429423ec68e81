#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "vlp/error.hpp"
#include "vlp/scene.hpp"
#include "vlp/vlp_solver.hpp"

using namespace vlp;

namespace {

constexpr double kD = 0.175;
const CameraIntrinsics K{};

ErrorCode error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::kIo;
}

struct RandomPose {
  Vec3 position;
  double roll, pitch, yaw;
};

RandomPose random_pose(std::mt19937_64& rng, double tilt = 0.2) {
  std::uniform_real_distribution<double> xy(-1.0, 1.0), z(0.3, 1.5), t(-tilt, tilt), yaw(-3.1, 3.1);
  return {{xy(rng), xy(rng), z(rng)}, t(rng), t(rng), yaw(rng)};
}

std::vector<LedObservation> observe_all(const std::vector<LedLamp>& lamps, const RandomPose& p) {
  std::vector<LedObservation> obs;
  for (const auto& l : lamps) obs.push_back(oracle::observe(l.uid, l.center, kD, p.position, p.roll, p.pitch, p.yaw, K));
  return obs;
}

}  // namespace

TEST_CASE("back_project examples") {
  const Vec3 axis = back_project(K, {}, {K.cx, K.cy});
  CHECK((axis - Vec3(0, 0, 1)).norm() < 1e-15);
  const Vec3 side = back_project(K, {}, {K.cx + 800.0, K.cy});
  CHECK((side - Vec3(1, 0, 1).normalized()).norm() < 1e-15);
  const Vec3 pitched = back_project(K, {0.0, std::numbers::pi / 2, 0.0}, {K.cx, K.cy});
  CHECK(std::abs(pitched.z()) < 1e-15);
  CHECK(pitched.norm() == doctest::Approx(1.0));
}

TEST_CASE("single LED: known height, straight under the lamp") {
  const auto o = oracle::observe(1, {1, 1, 2.5}, kD, {1, 1, 0.2}, 0, 0, 0, K);
  CHECK(o.centroid.u == K.cx);
  const PositionFix f = solve_single_led(o, ImuReading{0, 0, 0, true}, K, 0.2);
  CHECK((f.position - Vec3(1, 1, 0.2)).norm() < 1e-6);
  CHECK(f.scheme == Scheme::kSingleLed);
  CHECK(f.n_leds == 1);
}

TEST_CASE("single LED: range from apparent size") {
  LedObservation o;
  o.uid = 1;
  o.centroid = {K.cx, K.cy};
  o.equiv_diameter_px = 70.0;
  o.world = {0.0, 0.0, 2.5};
  o.physical_diameter_m = kD;
  const PositionFix f = solve_single_led(o, ImuReading{0, 0, 0, true}, K);
  CHECK(f.position.z() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.position.head<2>().norm() < 1e-12);
}

TEST_CASE("single LED: untrusted yaw and horizon rays") {
  const auto o = oracle::observe(1, {0, 0, 2.5}, kD, {0, 0, 0.5}, 0, 0, 0, K);
  CHECK(error_of([&] { solve_single_led(o, ImuReading{0, 0, 0, false}, K); }) == ErrorCode::kMissingYaw);
  CHECK(error_of([&] { solve_single_led(o, ImuReading{0, std::numbers::pi / 2, 0, true}, K); }) ==
        ErrorCode::kDegenerateGeometry);
}

TEST_CASE("single LED recovers random poses exactly") {
  std::mt19937_64 rng(31);
  const LedLamp lamp{7, {0.3, -0.2, 2.5}};
  for (int i = 0; i < 100; ++i) {
    const RandomPose p = random_pose(rng, 0.15);
    const auto o = oracle::observe(7, lamp.center, kD, p.position, p.roll, p.pitch, p.yaw, K);
    const ImuReading imu{p.roll, p.pitch, p.yaw, true};
    CHECK((solve_single_led(o, imu, K, p.position.z()).position - p.position).norm() < 1e-6);
    CHECK((solve_single_led(o, imu, K).position - p.position).norm() < 1e-6);
  }
}

TEST_CASE("double LED: midway under two lamps") {
  const Vec3 cam{1, 0, 0.5};
  const LedObservation obs[] = {oracle::observe(1, {0, 0, 2.5}, kD, cam, 0, 0, 0, K),
                                oracle::observe(2, {2, 0, 2.5}, kD, cam, 0, 0, 0, K)};
  const PositionFix f = solve_double_led(obs, ImuReading{}, K);
  CHECK((f.position - cam).norm() < 1e-6);
  CHECK(std::abs(f.yaw) < 1e-6);

  const double yaw = 30.0 * std::numbers::pi / 180.0;
  const LedObservation turned[] = {oracle::observe(1, {0, 0, 2.5}, kD, cam, 0, 0, yaw, K),
                                   oracle::observe(2, {2, 0, 2.5}, kD, cam, 0, 0, yaw, K)};
  const PositionFix g = solve_double_led(turned, ImuReading{}, K);
  CHECK(g.yaw == doctest::Approx(yaw).epsilon(1e-9));
  CHECK((g.position - cam).norm() < 1e-6);
  CHECK(g.scheme == Scheme::kDoubleLed);
}

TEST_CASE("double LED: coincident projections are degenerate") {
  LedObservation a = oracle::observe(1, {0, 0, 2.5}, kD, {0, 0, 0.5}, 0, 0, 0, K);
  LedObservation b = a;
  b.uid = 2;
  b.world = {0, 0, 2.0};
  const LedObservation obs[] = {a, b};
  CHECK(error_of([&] { solve_double_led(obs, ImuReading{}, K); }) == ErrorCode::kDegenerateGeometry);
}

TEST_CASE("double LED recovers random poses and yaw exactly") {
  std::mt19937_64 rng(32);
  const auto lamps = default_lamps();
  for (int i = 0; i < 100; ++i) {
    const RandomPose p = random_pose(rng);
    const LedObservation obs[] = {
        oracle::observe(lamps[0].uid, lamps[0].center, kD, p.position, p.roll, p.pitch, p.yaw, K),
        oracle::observe(lamps[2].uid, lamps[2].center, kD, p.position, p.roll, p.pitch, p.yaw, K)};
    const ImuReading imu{p.roll, p.pitch, 0.0, false};
    const PositionFix f = solve_double_led(obs, imu, K);
    CHECK((f.position - p.position).norm() < 1e-6);
    CHECK(std::abs(normalize_angle(f.yaw - p.yaw)) < 1e-6);
    const PositionFix h = solve_double_led(obs, imu, K, p.position.z());
    CHECK((h.position - p.position).norm() < 1e-6);
  }
}

TEST_CASE("multi LED: level camera at the grid centroid") {
  const auto obs = observe_all(default_lamps(), {{0, 0, 1.0}, 0, 0, 0});
  const PositionFix f = solve_multi_led(obs, K);
  CHECK(std::abs(f.position.x()) < 1e-9);
  CHECK(std::abs(f.position.y()) < 1e-9);
  CHECK(f.position.z() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.scheme == Scheme::kMultiLed);
  CHECK(f.n_leds == 4);
  CHECK(f.reference_uid == 1);
}

TEST_CASE("multi LED recovers random poses exactly") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 100; ++i) {
    const RandomPose p = random_pose(rng);
    const PositionFix f = solve_multi_led(observe_all(default_lamps(), p), K);
    CHECK((f.position - p.position).norm() < 1e-6);
    CHECK(std::abs(normalize_angle(f.yaw - p.yaw)) < 1e-6);
    CHECK(f.residual_px < 1e-6);
  }
}

TEST_CASE("multi LED: collinear lamps are degenerate") {
  std::vector<LedLamp> line{{1, {-1, 0, 2.5}}, {2, {0, 0, 2.5}}, {3, {1, 0, 2.5}}};
  const auto obs = observe_all(line, {{0, 0.3, 0.5}, 0, 0, 0});
  CHECK(error_of([&] { solve_multi_led(obs, K); }) == ErrorCode::kDegenerateGeometry);
}

TEST_CASE("Gauss-Newton cost never increases across accepted steps") {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int i = 0; i < 50; ++i) {
    const RandomPose p = random_pose(rng);
    auto obs = observe_all(default_lamps(), p);
    for (auto& o : obs) o.centroid = {o.centroid.u + noise(rng), o.centroid.v + noise(rng)};
    // A deliberately poor start exercises the line search.
    Pose guess{p.position + Vec3(0.3, -0.2, 0.2), {0.1, -0.1, p.yaw + 0.3}};
    const PositionFix f = solve_multi_led(obs, K, guess);
    REQUIRE(f.cost_history.size() >= 2);
    for (std::size_t k = 1; k < f.cost_history.size(); ++k) CHECK(f.cost_history[k] <= f.cost_history[k - 1]);
  }
}

TEST_CASE("numeric Jacobian agrees with an independent finite difference") {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 20; ++i) {
    const RandomPose p = random_pose(rng);
    const auto obs = observe_all(default_lamps(), p);
    const PoseVector x = to_pose_vector(Pose{p.position + Vec3(0.05, -0.03, 0.02), {p.roll, p.pitch, p.yaw}});
    const Eigen::MatrixXd j = numeric_jacobian(x, obs, K);
    // Five-point stencil with a different step.
    const double h = 1e-4;
    for (int c = 0; c < 6; ++c) {
      PoseVector e = PoseVector::Zero();
      e[c] = h;
      const Eigen::VectorXd d = (-reprojection_residuals(x + 2 * e, obs, K) + 8 * reprojection_residuals(x + e, obs, K) -
                                 8 * reprojection_residuals(x - e, obs, K) + reprojection_residuals(x - 2 * e, obs, K)) /
                                (12 * h);
      CHECK((j.col(c) - d).norm() <= 1e-4 * std::max(1.0, d.norm()));
    }
  }
}

TEST_CASE("pose vector round trip") {
  const Pose p{{0.1, -0.2, 0.3}, {0.01, -0.02, 1.2}};
  CHECK(from_pose_vector(to_pose_vector(p)) == p);
}

TEST_CASE("a fourth consistent lamp does not worsen the multi-LED fix") {
  std::mt19937_64 rng(36);
  const auto lamps = default_lamps();
  for (int i = 0; i < 50; ++i) {
    const RandomPose p = random_pose(rng);
    auto obs = observe_all(lamps, p);
    const std::vector<LedObservation> three(obs.begin(), obs.begin() + 3);
    const double e3 = (solve_multi_led(three, K).position - p.position).norm();
    const double e4 = (solve_multi_led(obs, K).position - p.position).norm();
    CHECK(e4 <= e3 + 1e-9);
  }
}

TEST_CASE("relabelling uids consistently does not change the fix") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 30; ++i) {
    const RandomPose p = random_pose(rng);
    auto obs = observe_all(default_lamps(), p);
    const PositionFix a = solve_multi_led(obs, K);
    // Keep the same lowest-uid lamp as reference so the anchor is unchanged.
    auto relabelled = obs;
    for (auto& o : relabelled) o.uid = o.uid == 1 ? 10 : 300 - o.uid;
    std::reverse(relabelled.begin(), relabelled.end());
    const PositionFix b = solve_multi_led(relabelled, K);
    CHECK((a.position - b.position).norm() <= 1e-12);
  }
}

TEST_CASE("select_scheme dispatch and fallback") {
  const RandomPose p{{0.2, -0.1, 0.8}, 0.02, -0.01, 0.4};
  const auto four = observe_all(default_lamps(), p);
  const ImuReading imu{p.roll, p.pitch, p.yaw, true};
  CHECK(select_scheme(four, imu, K).scheme == Scheme::kMultiLed);
  const std::vector<LedObservation> two(four.begin(), four.begin() + 2);
  CHECK(select_scheme(two, imu, K).scheme == Scheme::kDoubleLed);
  const std::vector<LedObservation> one(four.begin(), four.begin() + 1);
  CHECK(select_scheme(one, imu, K).scheme == Scheme::kSingleLed);
  CHECK(error_of([&] { select_scheme(one, ImuReading{0, 0, 0, false}, K); }) == ErrorCode::kNoFix);
  CHECK(error_of([&] { select_scheme({}, imu, K); }) == ErrorCode::kNoFix);

  std::vector<LedLamp> line{{1, {-1, 0, 2.5}}, {2, {0, 0, 2.5}}, {3, {1, 0, 2.5}}};
  const auto collinear = observe_all(line, {{0, 0.3, 0.5}, 0, 0, 0});
  const PositionFix f = select_scheme(collinear, ImuReading{0, 0, 0, true}, K);
  CHECK(f.scheme == Scheme::kDoubleLed);
  CHECK((f.position - Vec3(0, 0.3, 0.5)).norm() < 1e-6);
}

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::kSingleLed, Scheme::kDoubleLed, Scheme::kMultiLed}) CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scheme_from_string("TripleLed"), Error);
}
