#include "vlp/rs_camera.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vlp/error.hpp"
#include "vlp/occ_link.hpp"

namespace vlp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Row span [u_min, u_max] of a convex polygon at image row v.
std::optional<std::pair<double, double>> row_span(const std::vector<Pixel>& poly, double v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pixel& a = poly[i];
    const Pixel& b = poly[(i + 1) % n];
    const double vmin = std::min(a.v, b.v);
    const double vmax = std::max(a.v, b.v);
    if (v < vmin || v > vmax) continue;
    double u;
    if (a.v == b.v) {
      lo = std::min({lo, a.u, b.u});
      hi = std::max({hi, a.u, b.u});
      continue;
    }
    u = a.u + (v - a.v) * (b.u - a.u) / (b.v - a.v);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace

NoiseStream NoiseStream::for_frame(std::uint64_t seed, std::uint64_t agent_index,
                                   std::uint64_t tick) {
  return NoiseStream(splitmix64(splitmix64(splitmix64(seed) ^ agent_index) ^ tick));
}

double NoiseStream::uniform(std::uint64_t index) const {
  const std::uint64_t bits = splitmix64(key_ ^ splitmix64(index));
  // 53 random mantissa bits mapped into (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::gaussian(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::optional<Pixel> project_point(const Pose& camera_pose, const CameraIntrinsics& k,
                                   const Vec3& p_world) {
  const Vec3 p = rotation_matrix(camera_pose.orientation).transpose() *
                 (p_world - camera_pose.position);
  if (p.z() <= 0.0) return std::nullopt;
  return Pixel{k.cx + k.focal_px * p.x() / p.z(), k.cy + k.focal_px * p.y() / p.z()};
}

double row_exposure_fraction(const LedLamp& lamp, int row, const FrameTiming& timing) {
  if (!lamp.modulated) return 1.0;
  const double a = timing.t_start + row * timing.t_row;
  const double b = a + timing.t_exp;
  const double chip = 1.0 / lamp.chip_rate;
  // Sum over the chip-aligned pieces of [a, b]; the waveform is constant on each.
  double on = 0.0;
  double k = std::floor(a * lamp.chip_rate);
  double t = a;
  while (t < b) {
    const double boundary = std::min(b, (k + 1.0) * chip);
    if (boundary > t && waveform(lamp, (k + 0.5) * chip)) on += boundary - t;
    t = std::max(boundary, t);
    k += 1.0;
    if (boundary >= b) break;
  }
  return std::clamp(on / timing.t_exp, 0.0, 1.0);
}

std::vector<Vec3> lamp_outline(const LedLamp& lamp, int samples) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  if (lamp.shape == LampShape::kCircle) {
    const double r = lamp.size_m / 2.0;
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * std::numbers::pi * i / samples;
      pts.push_back(lamp.center + Vec3(r * std::cos(th), r * std::sin(th), 0.0));
    }
    return pts;
  }
  const double h = lamp.size_m / 2.0;
  const Vec3 corners[4] = {{-h, -h, 0}, {h, -h, 0}, {h, h, 0}, {-h, h, 0}};
  const int per_edge = std::max(1, samples / 4);
  for (int e = 0; e < 4; ++e) {
    const Vec3& a = corners[e];
    const Vec3& b = corners[(e + 1) % 4];
    for (int i = 0; i < per_edge; ++i) {
      pts.push_back(lamp.center + a + (b - a) * (static_cast<double>(i) / per_edge));
    }
  }
  return pts;
}

RsFrame render_frame(const Scenario& scenario, const AgentState& agent, double t_start,
                     const NoiseStream& noise) {
  const CameraIntrinsics& k = agent.camera;
  RsFrame frame{Image(k.width, k.height, static_cast<float>(scenario.ambient_level)), t_start,
                agent.pose, k};
  const FrameTiming timing{t_start, k.t_row, k.t_exp};

  // Accumulate in double so overlapping lamps sum before clamping.
  std::vector<double> acc(frame.pixels.data().size(), scenario.ambient_level);

  for (const LedLamp& lamp : scenario.lamps) {
    std::vector<Pixel> poly;
    bool behind = false;
    for (const Vec3& p : lamp_outline(lamp)) {
      auto px = project_point(agent.pose, k, p);
      if (!px) {
        behind = true;
        break;
      }
      poly.push_back(*px);
    }
    if (behind || poly.empty()) continue;

    double vmin = poly[0].v, vmax = poly[0].v;
    for (const auto& p : poly) {
      vmin = std::min(vmin, p.v);
      vmax = std::max(vmax, p.v);
    }
    const int row_lo = std::max(0, static_cast<int>(std::ceil(vmin)));
    const int row_hi = std::min(k.height - 1, static_cast<int>(std::floor(vmax)));
    for (int row = row_lo; row <= row_hi; ++row) {
      const auto span = row_span(poly, row);
      if (!span) continue;
      const int col_lo = std::max(0, static_cast<int>(std::ceil(span->first)));
      const int col_hi = std::min(k.width - 1, static_cast<int>(std::floor(span->second)));
      if (col_lo > col_hi) continue;
      const double level = lamp.radiance * row_exposure_fraction(lamp, row, timing);
      double* line = acc.data() + static_cast<std::size_t>(row) * k.width;
      for (int col = col_lo; col <= col_hi; ++col) line[col] += level;
    }
  }

  auto& out = frame.pixels.data();
  const double sigma = scenario.pixel_noise_sigma;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double value = acc[i];
    if (sigma > 0.0) value += sigma * noise.gaussian(i);
    out[i] = static_cast<float>(std::clamp(value, 0.0, 1.0));
  }
  return frame;
}

void write_pgm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<unsigned char> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(), [](float x) {
    return static_cast<unsigned char>(std::lround(std::clamp(x, 0.0f, 1.0f) * 255.0f));
  });
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  auto next_token = [&in]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(c);
    }
    return tok;
  };

  const std::string magic = next_token();
  if (magic != "P5" && magic != "P2") throw Error(ErrorCode::kParse, "not a PGM file: " + path.string());
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "bad PGM header in " + path.string());
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw Error(ErrorCode::kParse, "unsupported PGM geometry in " + path.string());
  }

  Image img(width, height);
  auto& data = img.data();
  if (magic == "P5") {
    std::vector<unsigned char> bytes(data.size());
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw Error(ErrorCode::kParse, "truncated PGM data in " + path.string());
    }
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = bytes[i] / static_cast<float>(maxval);
  } else {
    for (auto& px : data) {
      const std::string tok = next_token();
      if (tok.empty()) throw Error(ErrorCode::kParse, "truncated PGM data in " + path.string());
      px = std::stoi(tok) / static_cast<float>(maxval);
    }
  }
  return img;
}

}  // namespace vlp
