#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combplan/geometry.hpp"

namespace combplan {

// Per-pixel orientation map plus hair mask and scalp reference. Orientation
// values are directed angles in [0, 2pi) and are meaningful only where the
// mask is set; unmasked cells hold NaN.
struct OrientationState {
  int width = 0;
  int height = 0;
  std::vector<float> orientation;  // row-major, NaN where unmasked
  std::vector<uint8_t> mask;       // row-major, 0/1
  Polyline2D scalp_line = Polyline2D::from_points({{0.0, 0.0}, {1.0, 0.0}});

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool masked(int x, int y) const {
    return in_bounds(x, y) && mask[static_cast<size_t>(y) * width + x] != 0;
  }
  float angle_at(int x, int y) const {
    return orientation[static_cast<size_t>(y) * width + x];
  }
  size_t mask_count() const;
};

struct Landmark {
  std::string name;
  Vec2 position;
};

struct LandmarkSet {
  std::vector<Landmark> points;

  const Landmark* find(const std::string& name) const;
};

// Per-pixel orientation difference over the current mask plus its mean.
struct DifferenceReport {
  int width = 0;
  int height = 0;
  std::vector<float> delta;  // radians in [0, pi]; NaN outside the current mask
  // 1 where the current mask is set but the target mask is not; those delta
  // cells hold the configured penalty rather than a measured angle.
  std::vector<uint8_t> absent_target;
  double mean = 0.0;
  size_t coverage_penalty_count = 0;  // pixels where exactly one mask is set

  bool has_delta(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height &&
           !std::isnan(delta[static_cast<size_t>(y) * width + x]);
  }
  float delta_at(int x, int y) const {
    return delta[static_cast<size_t>(y) * width + x];
  }
  bool is_penalty(int x, int y) const {
    return absent_target[static_cast<size_t>(y) * width + x] != 0;
  }
};

// Least-squares similarity (rotation + uniform scale + translation) fitted
// to landmark pairs, mapping source pixel coordinates to destination pixel
// coordinates. Pixel coordinates are y-down, so `rotation_ccw` (the amount
// added to orientation angles) is the negative of the matrix angle.
struct SimilarityTransform {
  double scale = 1.0;
  double cos_a = 1.0;  // matrix angle, y-down convention
  double sin_a = 0.0;
  Vec2 translation{0.0, 0.0};

  Vec2 apply(const Vec2& p) const {
    return {scale * (cos_a * p.x - sin_a * p.y) + translation.x,
            scale * (sin_a * p.x + cos_a * p.y) + translation.y};
  }
  Vec2 apply_inverse(const Vec2& p) const {
    const Vec2 q{(p.x - translation.x) / scale, (p.y - translation.y) / scale};
    return {cos_a * q.x + sin_a * q.y, -sin_a * q.x + cos_a * q.y};
  }
  // Angle added to orientation values under this transform.
  double orientation_shift() const { return normalize_angle(std::atan2(-sin_a, cos_a)); }
};

// Fit the similarity mapping `from` landmarks onto `to` landmarks; pairs are
// matched by name. Throws AlignmentError on fewer than 3 correspondences or
// collinear landmarks.
SimilarityTransform fit_similarity(const LandmarkSet& from, const LandmarkSet& to);

// Resample the target state under the landmark-fitted similarity transform:
// mask via nearest-neighbor lookup, orientation values rotated by the fitted
// rotation, scalp line mapped forward.
OrientationState align_target(const OrientationState& target_state,
                              const LandmarkSet& target_landmarks,
                              const LandmarkSet& current_landmarks);

// Binary morphological erosion with a square structuring element of side
// kernel_size (odd). Pixels outside the grid count as unset.
std::vector<uint8_t> erode_mask(const std::vector<uint8_t>& mask, int width,
                                int height, int kernel_size);

// Convenience: erode the state's mask and blank orientation outside it.
OrientationState eroded(const OrientationState& state, int kernel_size);

// Per-pixel orientation difference over the current mask (Delta-theta) and
// its mean. Pixels covered by the current mask but not the target mask take
// `absent_mask_penalty`. Grids must share dimensions; masks are expected to
// be eroded already.
DifferenceReport difference_map(const OrientationState& current,
                                const OrientationState& aligned_target,
                                double absent_mask_penalty);

inline constexpr double kDefaultAbsentMaskPenalty = kPi / 2.0;

// --- file formats ----------------------------------------------------------

// "ORIENT v1 <w> <h>" header, w*h little-endian float32 (NaN = unmasked),
// then the scalp polyline as one line of comma-joined x,y pairs.
void write_orientation_file(const OrientationState& state, const std::string& path);
OrientationState read_orientation_file(const std::string& path);

// 8-bit binary PPM heatmap: blue for small differences through red for large
// ones; pixels without a difference value are black.
void write_difference_ppm(const DifferenceReport& report, const std::string& path);

}  // namespace combplan
