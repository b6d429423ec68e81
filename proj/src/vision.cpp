#include "vlp/vision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "vlp/error.hpp"

namespace vlp {

namespace {

struct Run {
  bool lit;
  int length;
};

std::vector<Run> run_lengths(const std::vector<std::uint8_t>& bits) {
  std::vector<Run> runs;
  for (auto b : bits) {
    if (!runs.empty() && runs.back().lit == (b != 0)) {
      ++runs.back().length;
    } else {
      runs.push_back({b != 0, 1});
    }
  }
  return runs;
}

// Vertical closing with a (2r+1)-row window, as if the image were padded
// with background: a column is only ever filled between its first and last
// set rows.
std::vector<std::uint8_t> close_vertical(const std::vector<std::uint8_t>& in, int w, int h, int r) {
  std::vector<std::uint8_t> out(in);
  std::vector<int> prefix(static_cast<std::size_t>(h) + 1);
  std::vector<std::uint8_t> dil(static_cast<std::size_t>(h));
  for (int u = 0; u < w; ++u) {
    int first = -1, last = -1;
    prefix[0] = 0;
    for (int v = 0; v < h; ++v) {
      const int bit = in[static_cast<std::size_t>(v) * w + u];
      prefix[v + 1] = prefix[v] + bit;
      if (bit) {
        if (first < 0) first = v;
        last = v;
      }
    }
    if (first < 0 || first == last) continue;
    for (int v = 0; v < h; ++v) {
      dil[v] = prefix[std::min(h, v + r + 1)] - prefix[std::max(0, v - r)] > 0;
    }
    prefix[0] = 0;
    for (int v = 0; v < h; ++v) prefix[v + 1] = prefix[v] + dil[v];
    for (int v = first + 1; v < last; ++v) {
      const int lo = std::max(0, v - r);
      const int hi = std::min(h, v + r + 1);
      if (prefix[hi] - prefix[lo] == hi - lo) out[static_cast<std::size_t>(v) * w + u] = 1;
    }
  }
  return out;
}

constexpr std::array<PixelIndex, 8> kDirs = {{{1, 0}, {1, 1}, {0, 1}, {-1, 1},
                                             {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

// Clockwise Moore-neighbour trace of the component's outer boundary.
std::vector<PixelIndex> trace_contour(const RoiDetection& roi) {
  std::vector<PixelIndex> contour;
  PixelIndex start{-1, -1};
  for (int v = roi.v_min; v <= roi.v_max && start.u < 0; ++v) {
    for (int u = roi.u_min; u <= roi.u_max; ++u) {
      if (roi.in_mask(u, v)) {
        start = {u, v};
        break;
      }
    }
  }
  if (start.u < 0) return contour;
  contour.push_back(start);

  PixelIndex cur = start;
  int search = 7;
  int first_dir = -1;
  const std::size_t cap = 4 * static_cast<std::size_t>(roi.pixel_count) + 8;
  while (contour.size() < cap) {
    int found = -1;
    for (int k = 0; k < 8; ++k) {
      const int d = (search + k) % 8;
      if (roi.in_mask(cur.u + kDirs[d].u, cur.v + kDirs[d].v)) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    if (cur.u == start.u && cur.v == start.v && found == first_dir) break;
    if (first_dir < 0) first_dir = found;
    cur = {cur.u + kDirs[found].u, cur.v + kDirs[found].v};
    if (!(cur.u == start.u && cur.v == start.v)) contour.push_back(cur);
    search = (found + 5) % 8;
  }
  return contour;
}

// Fits halfwidth^2(v) = a + b v + c v^2 to the lit rows. For an elliptical
// outline the vertex is the ellipse center row and the chord midpoints lie on
// a line through the center, so dark stripes do not bias the estimate.
bool fit_outline(RoiDetection& roi, const std::vector<std::uint8_t>& lit, int width) {
  struct Chord {
    double v, half, mid;
  };
  std::vector<Chord> chords;
  for (int v = roi.v_min; v <= roi.v_max; ++v) {
    int left = -1, right = -1, count = 0;
    const std::uint8_t* line = lit.data() + static_cast<std::size_t>(v) * width;
    for (int u = roi.u_min; u <= roi.u_max; ++u) {
      if (line[u] && roi.in_mask(u, v)) {
        if (left < 0) left = u;
        right = u;
        ++count;
      }
    }
    // Rows caught mid-transition sit near threshold and have ragged ends.
    if (left >= 0 && count >= 0.9 * (right - left + 1)) {
      chords.push_back({double(v), 0.5 * (right - left + 1), 0.5 * (left + right)});
    }
  }
  if (chords.size() < 6) return false;
  const double span = chords.back().v - chords.front().v;
  if (span < 5.0) return false;

  // Center the abscissa for conditioning.
  const double v_ref = 0.5 * (chords.front().v + chords.back().v);
  Eigen::Vector3d q;
  Eigen::Vector2d line;
  auto solve = [&](const std::vector<Chord>& cs) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    Eigen::Matrix2d mtm = Eigen::Matrix2d::Zero();
    Eigen::Vector2d mtb = Eigen::Vector2d::Zero();
    for (const auto& c : cs) {
      const double x = c.v - v_ref;
      const Eigen::Vector3d row(1.0, x, x * x);
      ata += row * row.transpose();
      atb += row * (c.half * c.half);
      const Eigen::Vector2d lrow(1.0, x);
      mtm += lrow * lrow.transpose();
      mtb += lrow * c.mid;
    }
    q = ata.ldlt().solve(atb);
    line = mtm.ldlt().solve(mtb);
  };
  auto residual = [&](const Chord& c) {
    const double x = c.v - v_ref;
    return c.half * c.half - (q[0] + q[1] * x + q[2] * x * x);
  };

  // Noise can clip or extend a few chords; refit without them.
  solve(chords);
  std::vector<double> abs_res;
  for (const auto& c : chords) abs_res.push_back(std::abs(residual(c)));
  auto med = abs_res.begin() + static_cast<std::ptrdiff_t>(abs_res.size() / 2);
  std::nth_element(abs_res.begin(), med, abs_res.end());
  const double cut = std::max(4.0 * 1.4826 * *med, 0.01 * std::max(q[0], 1.0));
  std::vector<Chord> inliers;
  for (const auto& c : chords) {
    if (std::abs(residual(c)) <= cut) inliers.push_back(c);
  }
  if (inliers.size() < 6 || inliers.size() < 0.8 * chords.size()) return false;
  solve(inliers);

  const double curv = -q[2];
  if (!(curv > 0.0)) return false;
  const double x0 = q[1] / (2.0 * curv);
  const double peak = q[0] + q[1] * x0 - curv * x0 * x0;  // max halfwidth^2
  if (!(peak > 0.0)) return false;
  const double semi_v = std::sqrt(peak / curv);
  const double v0 = v_ref + x0;

  double sq = 0.0;
  for (const auto& c : inliers) sq += std::pow(residual(c), 2);
  const double rms_rel = std::sqrt(sq / inliers.size()) / peak;
  const double extent = std::max(roi.bbox_height(), roi.bbox_width());
  if (rms_rel > 0.08 || semi_v > extent || v0 < roi.v_min - 0.5 || v0 > roi.v_max + 0.5) {
    return false;
  }

  roi.centroid = {line[0] + line[1] * x0, v0};
  roi.equiv_diameter = 2.0 * std::sqrt(std::sqrt(peak) * semi_v);
  return true;
}

}  // namespace

std::vector<RoiDetection> detect_rois(const RsFrame& frame, const VisionConfig& config) {
  return detect_rois(frame.pixels, config);
}

std::vector<RoiDetection> detect_rois(const Image& image, const VisionConfig& config) {
  std::vector<RoiDetection> rois;
  const int w = image.width();
  const int h = image.height();
  const auto& px = image.data();
  if (px.empty()) return rois;

  std::vector<float> sorted(px);
  auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double ambient = *mid;
  const double peak = *std::max_element(px.begin(), px.end());
  // Noise scale from horizontal neighbour differences: stripes are constant
  // along a row, so only noise (and the few outline pixels) survive, however
  // much of the frame a lamp covers. The threshold never drops into the noise,
  // else the closing step welds noise into blobs.
  std::vector<float> diffs;
  diffs.reserve(px.size());
  for (int v = 0; v < h; ++v) {
    const float* row = px.data() + static_cast<std::size_t>(v) * w;
    for (int u = 0; u + 1 < w; ++u) diffs.push_back(std::abs(row[u + 1] - row[u]));
  }
  double sigma = 0.0;
  if (!diffs.empty()) {
    auto dmid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
    std::nth_element(diffs.begin(), dmid, diffs.end());
    sigma = 1.4826 * *dmid / std::numbers::sqrt2;
  }
  if (peak - ambient < std::max(0.05, 2.0 * config.noise_floor_sigmas * sigma)) return rois;
  const double threshold =
      ambient + std::max(config.threshold_fraction * (peak - ambient), config.noise_floor_sigmas * sigma);

  std::vector<std::uint8_t> lit(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) lit[i] = px[i] > threshold;
  const auto closed = close_vertical(lit, w, h, config.max_stripe_rows);

  std::vector<int> label(px.size(), -1);
  std::vector<PixelIndex> stack;
  std::vector<PixelIndex> members;
  int next_label = 0;
  for (int v0 = 0; v0 < h; ++v0) {
    for (int u0 = 0; u0 < w; ++u0) {
      const std::size_t i0 = static_cast<std::size_t>(v0) * w + u0;
      if (!closed[i0] || label[i0] >= 0) continue;

      members.clear();
      stack.assign(1, {u0, v0});
      label[i0] = next_label;
      while (!stack.empty()) {
        const PixelIndex p = stack.back();
        stack.pop_back();
        members.push_back(p);
        for (const auto& d : kDirs) {
          const int u = p.u + d.u, v = p.v + d.v;
          if (u < 0 || v < 0 || u >= w || v >= h) continue;
          const std::size_t i = static_cast<std::size_t>(v) * w + u;
          if (closed[i] && label[i] < 0) {
            label[i] = next_label;
            stack.push_back({u, v});
          }
        }
      }
      ++next_label;
      if (static_cast<int>(members.size()) < config.min_pixels) continue;

      RoiDetection roi;
      roi.u_min = w, roi.v_min = h, roi.u_max = -1, roi.v_max = -1;
      for (const auto& p : members) {
        roi.u_min = std::min(roi.u_min, p.u);
        roi.u_max = std::max(roi.u_max, p.u);
        roi.v_min = std::min(roi.v_min, p.v);
        roi.v_max = std::max(roi.v_max, p.v);
      }
      roi.pixel_count = static_cast<int>(members.size());
      roi.mask.assign(static_cast<std::size_t>(roi.bbox_width()) * roi.bbox_height(), 0);
      double wsum = 0.0, usum = 0.0, vsum = 0.0;
      for (const auto& p : members) {
        const std::size_t i = static_cast<std::size_t>(p.v) * w + p.u;
        roi.mask[static_cast<std::size_t>(p.v - roi.v_min) * roi.bbox_width() + (p.u - roi.u_min)] = 1;
        if (lit[i]) ++roi.lit_count;
        const double weight = std::max(0.0, px[i] - ambient);
        wsum += weight;
        usum += weight * p.u;
        vsum += weight * p.v;
      }
      roi.touches_border = roi.u_min == 0 || roi.v_min == 0 || roi.u_max == w - 1 || roi.v_max == h - 1;
      roi.modulated = roi.lit_count < 0.9 * roi.pixel_count;

      roi.outline_fit = fit_outline(roi, lit, w);
      if (!roi.outline_fit) {
        roi.centroid = wsum > 0.0 ? Pixel{usum / wsum, vsum / wsum}
                                  : Pixel{0.5 * (roi.u_min + roi.u_max), 0.5 * (roi.v_min + roi.v_max)};
        const double duty = roi.modulated ? double(kFrameChips) / kOnesPerFrame : 1.0;
        roi.equiv_diameter = 2.0 * std::sqrt(roi.lit_count * duty / std::numbers::pi);
      }
      roi.contour = trace_contour(roi);
      rois.push_back(std::move(roi));
    }
  }
  return rois;
}

StripeProfile extract_profile(const Image& image, const RoiDetection& roi, const VisionConfig& config) {
  if (roi.bbox_height() < 4) {
    throw DecodeError(ErrorCode::kTooSmall, "ROI spans " + std::to_string(roi.bbox_height()) + " rows");
  }
  StripeProfile prof;
  prof.v_min = roi.v_min;
  prof.v_max = roi.v_max;
  const int center = static_cast<int>(std::lround(roi.centroid.u));
  const int half = config.band_width / 2;
  double last = std::numeric_limits<double>::quiet_NaN();
  for (int v = roi.v_min; v <= roi.v_max; ++v) {
    double sum = 0.0;
    int n = 0;
    for (int u = center - half; u <= center + half; ++u) {
      if (roi.in_mask(u, v)) {
        sum += image.at(u, v);
        ++n;
      }
    }
    if (n == 0) {
      // Band fell outside the component on this row; use the whole row.
      for (int u = roi.u_min; u <= roi.u_max; ++u) {
        if (roi.in_mask(u, v)) {
          sum += image.at(u, v);
          ++n;
        }
      }
    }
    const double value = n > 0 ? sum / n : last;
    prof.samples.push_back(value);
    if (n > 0) last = value;
  }
  // Leading rows with no samples take the first real value.
  auto first = std::find_if(prof.samples.begin(), prof.samples.end(), [](double x) { return !std::isnan(x); });
  if (first == prof.samples.end()) throw DecodeError(ErrorCode::kTooSmall, "empty ROI");
  std::fill(prof.samples.begin(), first, *first);
  return prof;
}

namespace {

struct Binarized {
  std::vector<std::uint8_t> bits;
  double lo = 0.0;
  double hi = 0.0;
};

Binarized binarize(std::span<const double> samples) {
  Binarized b;
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  b.lo = *mn;
  b.hi = *mx;
  const double mid = 0.5 * (b.lo + b.hi);
  b.bits.reserve(samples.size());
  for (double s : samples) b.bits.push_back(s > mid ? 1 : 0);
  return b;
}

bool flat(double lo, double hi) { return hi - lo < 0.25 * hi || hi <= 0.0; }

void append_interior_runs(const std::vector<Run>& runs, std::vector<int>& out) {
  for (std::size_t i = 1; i + 1 < runs.size(); ++i) out.push_back(runs[i].length);
}

}  // namespace

DecodeResult decode_roi(const StripeProfile& profile) {
  if (profile.samples.size() < 4) {
    throw DecodeError(ErrorCode::kTooSmall, "profile shorter than 4 rows");
  }
  const Binarized bin = binarize(profile.samples);
  if (flat(bin.lo, bin.hi)) throw DecodeError(ErrorCode::kDegenerateProfile, "no stripes in profile");

  const auto runs = run_lengths(bin.bits);
  std::vector<int> interior;
  append_interior_runs(runs, interior);
  const double rows_per_chip = estimate_chip_rows(interior);

  const int visible = static_cast<int>(std::lround(profile.samples.size() / rows_per_chip));
  if (visible < kMinDecodeChips) {
    throw DecodeError(ErrorCode::kNeedMoreRows,
                      std::to_string(visible) + " chips visible, need " + std::to_string(kMinDecodeChips),
                      0.0, visible);
  }

  std::vector<std::uint8_t> chips;
  for (const auto& r : runs) {
    const long n = std::lround(r.length / rows_per_chip);
    chips.insert(chips.end(), static_cast<std::size_t>(std::max(0L, n)), r.lit ? 1 : 0);
  }
  return decode_chips(chips);
}

DecodeResult decode_fused(std::span<const TimedProfile> profiles) {
  if (profiles.empty()) throw DecodeError(ErrorCode::kNeedMoreRows, "no profiles", 0.0, 0);

  std::vector<double> all;
  for (const auto& p : profiles) all.insert(all.end(), p.profile.samples.begin(), p.profile.samples.end());
  const auto [mn, mx] = std::minmax_element(all.begin(), all.end());
  const double lo = *mn, hi = *mx;
  if (flat(lo, hi)) throw DecodeError(ErrorCode::kDegenerateProfile, "no stripes in fused profiles");
  const double mid = 0.5 * (lo + hi);

  struct Sample {
    double t;
    std::uint8_t bit;
  };
  std::vector<Sample> samples;
  std::vector<int> interior;
  double t_row = profiles.front().t_row;
  std::size_t total_rows = 0;
  for (const auto& p : profiles) {
    std::vector<std::uint8_t> bits;
    for (std::size_t i = 0; i < p.profile.samples.size(); ++i) {
      const std::uint8_t b = p.profile.samples[i] > mid ? 1 : 0;
      bits.push_back(b);
      samples.push_back({p.row_time(p.profile.v_min + static_cast<int>(i)), b});
    }
    append_interior_runs(run_lengths(bits), interior);
    total_rows += bits.size();
  }
  const double rows_per_chip = estimate_chip_rows(interior);
  const double chip0 = rows_per_chip * t_row;
  const int visible = static_cast<int>(std::lround(total_rows / rows_per_chip));
  // Same redundancy as a single profile: two frames' worth of chips, else a
  // short history can fold consistently onto the wrong code.
  if (visible < kMinDecodeChips) {
    throw DecodeError(ErrorCode::kNeedMoreRows, std::to_string(visible) + " chips across frames", 0.0,
                      visible);
  }

  double t_ref = samples.front().t, t_end = samples.front().t;
  for (const auto& s : samples) {
    t_ref = std::min(t_ref, s.t);
    t_end = std::max(t_end, s.t);
  }
  const double span_chips = std::max(1.0, (t_end - t_ref) / chip0);

  constexpr int kBinsPerChip = 8;
  constexpr int kBins = kFrameChips * kBinsPerChip;
  std::array<int, kBins> count{};
  std::array<int, kBins> ones{};
  auto fold_score = [&](double chip) {
    count.fill(0);
    ones.fill(0);
    const double period = kFrameChips * chip;
    for (const auto& s : samples) {
      double phase = std::fmod((s.t - t_ref) / period, 1.0);
      int bin = static_cast<int>(phase * kBins);
      bin = std::clamp(bin, 0, kBins - 1);
      ++count[bin];
      ones[bin] += s.bit;
    }
    double score = 0.0;
    for (int b = 0; b < kBins; ++b) {
      if (count[b] > 0) score += double(ones[b]) * (count[b] - ones[b]) / count[b];
    }
    return score;
  };

  // Coarse scan keeps the accumulated drift over the span under a quarter chip.
  constexpr double kRange = 0.08;
  const double step = std::max(0.25 / span_chips, 2.0 * kRange / 4000.0);
  double best_chip = chip0;
  double best_score = std::numeric_limits<double>::infinity();
  for (double rel = -kRange; rel <= kRange + 1e-12; rel += step) {
    const double chip = chip0 * (1.0 + rel);
    const double s = fold_score(chip);
    if (s < best_score - 1e-9 || (std::abs(s - best_score) <= 1e-9 && std::abs(rel) < std::abs(best_chip / chip0 - 1.0))) {
      best_score = s;
      best_chip = chip;
    }
  }
  const double coarse = best_chip;
  for (int k = -8; k <= 8; ++k) {
    const double chip = coarse * (1.0 + k * step / 8.0);
    const double s = fold_score(chip);
    if (s < best_score - 1e-9) {
      best_score = s;
      best_chip = chip;
    }
  }

  // Align chip boundaries to the folded transitions.
  const double period = kFrameChips * best_chip;
  std::array<int, kFrameChips> c_count{}, c_ones{};
  std::array<std::uint8_t, kFrameChips> folded{};
  int best_agree = -1;
  for (int o = 0; o < 16; ++o) {
    const double offset = o / 16.0;
    std::array<int, kFrameChips> cnt{}, on{};
    for (const auto& s : samples) {
      const double phase = std::fmod((s.t - t_ref) / period, 1.0) * kFrameChips - offset;
      int c = static_cast<int>(std::floor(phase));
      c = ((c % kFrameChips) + kFrameChips) % kFrameChips;
      ++cnt[c];
      on[c] += s.bit;
    }
    int agree = 0;
    for (int c = 0; c < kFrameChips; ++c) agree += std::max(on[c], cnt[c] - on[c]);
    if (agree > best_agree) {
      best_agree = agree;
      c_count = cnt;
      c_ones = on;
    }
  }
  int covered = 0;
  for (int c = 0; c < kFrameChips; ++c) {
    if (c_count[c] >= 0.5 * rows_per_chip) ++covered;
    folded[c] = 2 * c_ones[c] > c_count[c] ? 1 : 0;
  }
  if (covered < kFrameChips) {
    throw DecodeError(ErrorCode::kNeedMoreRows,
                      std::to_string(covered) + " of 21 chip phases observed", 0.0, covered);
  }
  const double agreement = double(best_agree) / samples.size();
  if (agreement < 0.9) {
    throw DecodeError(ErrorCode::kDegenerateProfile, "inconsistent fold across frames");
  }

  std::vector<std::uint8_t> stream(folded.begin(), folded.end());
  stream.insert(stream.end(), folded.begin(), folded.end());
  return decode_chips(stream);
}

std::optional<int> LampTracker::try_decode(Track& track, const TimedProfile& latest) const {
  try {
    return decode_roi(latest.profile).uid;
  } catch (const DecodeError&) {
  }
  if (track.history.size() < 2) return std::nullopt;
  try {
    std::vector<TimedProfile> hist(track.history.begin(), track.history.end());
    return decode_fused(hist).uid;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

std::vector<TrackedRoi> LampTracker::update(const RsFrame& frame, const UidDatabase* db) {
  auto rois = detect_rois(frame, config_);
  std::vector<TrackedRoi> out;

  // Greedy nearest-centroid association.
  struct Pair {
    double d;
    std::size_t track, roi;
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    for (std::size_t r = 0; r < rois.size(); ++r) {
      const double du = tracks_[t].last.u - rois[r].centroid.u;
      const double dv = tracks_[t].last.v - rois[r].centroid.v;
      const double d = std::hypot(du, dv);
      const double gate = std::max(15.0, 0.5 * std::max(tracks_[t].diameter, rois[r].equiv_diameter));
      if (d <= gate) pairs.push_back({d, t, r});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
  std::vector<int> roi_track(rois.size(), -1);
  std::vector<bool> track_used(tracks_.size(), false);
  for (const auto& p : pairs) {
    if (track_used[p.track] || roi_track[p.roi] >= 0) continue;
    track_used[p.track] = true;
    roi_track[p.roi] = static_cast<int>(p.track);
  }

  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    if (!track_used[t]) ++tracks_[t].missed;
  }
  for (std::size_t r = 0; r < rois.size(); ++r) {
    if (roi_track[r] < 0) {
      Track fresh;
      fresh.id = next_id_++;
      tracks_.push_back(std::move(fresh));
      roi_track[r] = static_cast<int>(tracks_.size() - 1);
    }
  }

  for (std::size_t r = 0; r < rois.size(); ++r) {
    Track& track = tracks_[static_cast<std::size_t>(roi_track[r])];
    track.last = rois[r].centroid;
    track.diameter = rois[r].equiv_diameter;
    track.missed = 0;
    if (!track.uid) {
      try {
        TimedProfile tp{extract_profile(frame.pixels, rois[r], config_), frame.t_start,
                        frame.intrinsics.t_row, frame.intrinsics.t_exp};
        track.history.push_back(tp);
        while (track.history.size() > max_history_) track.history.pop_front();
        if (auto uid = try_decode(track, tp); uid && (db == nullptr || db->contains(*uid))) {
          track.uid = uid;
          track.history.clear();
        }
      } catch (const DecodeError&) {
        // Too small to profile this frame.
      }
    }
    out.push_back({track.id, std::move(rois[r]), track.uid});
  }

  std::erase_if(tracks_, [](const Track& t) { return t.missed > 2; });
  return out;
}

}  // namespace vlp
