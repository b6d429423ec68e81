#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "vlp/occ_link.hpp"
#include "vlp/rs_camera.hpp"
#include "vlp/scene.hpp"

namespace vlp {

struct VisionConfig {
  double threshold_fraction = 0.25;
  // Longest dark stretch to bridge when merging stripes; closing window is
  // 2 * max_stripe_rows + 1. Three dark chips at 1 kHz and 50 us rows is 60 rows.
  int max_stripe_rows = 30;
  int min_pixels = 100;
  // Threshold floor above ambient, in robust noise standard deviations.
  double noise_floor_sigmas = 6.0;
  int band_width = 5;
};

struct PixelIndex {
  int u = 0;
  int v = 0;
};

struct RoiDetection {
  int u_min = 0;
  int v_min = 0;
  int u_max = 0;
  int v_max = 0;
  Pixel centroid;
  std::vector<PixelIndex> contour;
  double equiv_diameter = 0.0;
  int pixel_count = 0;  // pixels of the merged (closed) component
  int lit_count = 0;    // pixels above threshold before merging
  bool modulated = false;
  bool touches_border = false;
  // True when centroid and diameter come from the elliptical chord fit.
  bool outline_fit = false;
  // Merged component mask over the bbox, row-major.
  std::vector<std::uint8_t> mask;

  int bbox_width() const { return u_max - u_min + 1; }
  int bbox_height() const { return v_max - v_min + 1; }
  bool in_mask(int u, int v) const {
    return u >= u_min && u <= u_max && v >= v_min && v <= v_max &&
           mask[static_cast<std::size_t>(v - v_min) * bbox_width() + (u - u_min)] != 0;
  }
};

struct StripeProfile {
  std::vector<double> samples;
  int v_min = 0;
  int v_max = 0;
};

/// A profile plus the sensor timing needed to place each row in time.
struct TimedProfile {
  StripeProfile profile;
  double t_start = 0.0;
  double t_row = 50e-6;
  double t_exp = 50e-6;

  double row_time(int row) const { return t_start + row * t_row + 0.5 * t_exp; }
};

std::vector<RoiDetection> detect_rois(const RsFrame& frame, const VisionConfig& config = {});
std::vector<RoiDetection> detect_rois(const Image& image, const VisionConfig& config = {});

/// Throws DecodeError(kTooSmall) when the bbox is under 4 rows.
StripeProfile extract_profile(const Image& image, const RoiDetection& roi,
                              const VisionConfig& config = {});

/// Single-profile decode. Throws DecodeError with kDegenerateProfile, kNoSync,
/// kInvalidManchester, or kNeedMoreRows (chips_seen set).
DecodeResult decode_roi(const StripeProfile& profile);

/// Decodes a lamp from several short profiles captured at known times by
/// folding their samples on the chip period estimated from the stripes.
DecodeResult decode_fused(std::span<const TimedProfile> profiles);

struct TrackedRoi {
  int track_id = 0;
  RoiDetection roi;
  std::optional<int> uid;
};

/// Associates ROIs across frames and decodes each lamp once, fusing short
/// profiles until a uid is recovered.
class LampTracker {
 public:
  explicit LampTracker(VisionConfig config = {}, std::size_t max_history = 12)
      : config_(config), max_history_(max_history) {}

  /// `db` rejects uids not in the database; pass nullptr to accept any.
  std::vector<TrackedRoi> update(const RsFrame& frame, const UidDatabase* db);

  void reset() { tracks_.clear(); }

 private:
  struct Track {
    int id = 0;
    Pixel last;
    double diameter = 0.0;
    int missed = 0;
    std::deque<TimedProfile> history;
    std::optional<int> uid;
  };

  std::optional<int> try_decode(Track& track, const TimedProfile& latest) const;

  VisionConfig config_;
  std::size_t max_history_;
  std::vector<Track> tracks_;
  int next_id_ = 0;
};

}  // namespace vlp
