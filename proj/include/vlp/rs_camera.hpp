#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "vlp/geometry.hpp"
#include "vlp/scene.hpp"

namespace vlp {

/// Row-major single-channel float image, intensities in [0,1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f)
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  float& at(int u, int v) { return data_[static_cast<std::size_t>(v) * width_ + u]; }
  float at(int u, int v) const { return data_[static_cast<std::size_t>(v) * width_ + u]; }
  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

struct RsFrame {
  Image pixels;
  double t_start = 0.0;  // exposure start of row 0
  Pose camera_pose;
  CameraIntrinsics intrinsics;
};

/// Exposure timing of one frame.
struct FrameTiming {
  double t_start = 0.0;
  double t_row = 50e-6;
  double t_exp = 50e-6;
};

/// Counter-based Gaussian noise source. Each pixel's draw depends only on
/// (key, pixel index), so rendering order never changes the output.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t key) : key_(key) {}

  static NoiseStream for_frame(std::uint64_t seed, std::uint64_t agent_index, std::uint64_t tick);

  double gaussian(std::uint64_t index) const;
  double uniform(std::uint64_t index) const;

 private:
  std::uint64_t key_;
};

/// Pinhole projection; std::nullopt when the point is not in front of the camera.
std::optional<Pixel> project_point(const Pose& camera_pose, const CameraIntrinsics& k,
                                   const Vec3& p_world);

/// Mean of the lamp waveform over the row's exposure window.
double row_exposure_fraction(const LedLamp& lamp, int row, const FrameTiming& timing);

/// Synthesizes one rolling-shutter frame for the agent's camera.
RsFrame render_frame(const Scenario& scenario, const AgentState& agent, double t_start,
                     const NoiseStream& noise);

/// World-space rim samples of a lamp face (horizontal, facing down).
std::vector<Vec3> lamp_outline(const LedLamp& lamp, int samples = 64);

/// Binary PGM (P5, maxval 255). Throws Error(kIo).
void write_pgm(const Image& image, const std::filesystem::path& path);
/// Reads P5 or P2 PGM. Throws Error(kIo) or Error(kParse).
Image read_pgm(const std::filesystem::path& path);

}  // namespace vlp
