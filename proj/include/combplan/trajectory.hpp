#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "combplan/geometry.hpp"
#include "combplan/planner.hpp"

namespace combplan {

// Pixel-to-mm back-projection: X = (px - cx) * sx, Y = (py - cy) * sy,
// Z = depth at the pixel.
struct Intrinsics {
  double sx = 1.0;  // mm per px
  double sy = 1.0;
  double cx = 0.0;  // principal point, px
  double cy = 0.0;
};

struct DepthGrid {
  int width = 0;
  int height = 0;
  std::vector<float> depth;  // mm, NaN = no surface
  Intrinsics intrinsics;

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  float depth_at(int x, int y) const {
    return depth[static_cast<size_t>(y) * width + x];
  }
  bool defined(int x, int y) const {
    return in_bounds(x, y) && !std::isnan(depth_at(x, y));
  }
};

// Back-project a pixel to Cartesian mm. NaN pixels borrow the nearest
// defined depth within 3 px; beyond that, DepthHoleError.
Vec3 lift_point(const DepthGrid& grid, const Vec2& pixel);

// Plane through >= 3 points by RANSAC (3-point hypotheses, inlier counting,
// least-squares refit over the best inlier set). The normal is unit length
// and oriented so c >= 0 (ties: b >= 0, then a >= 0). Deterministic for a
// given seed. Throws PlaneFitError when no valid hypothesis exists.
Plane3D ransac_plane(std::span<const Vec3> points, int iterations,
                     double inlier_tol, uint64_t rng_seed);

struct RansacConfig {
  int iterations = 200;
  double inlier_tol = 1.5;  // mm
  int window = 11;          // px, square window for local plane estimation
};

struct ToolTrajectory {
  std::vector<Frame3D> poses;  // approach, contacts..., retract
  double approach_clearance = 20.0;  // mm
  double retract_clearance = 20.0;   // mm

  // Max orthonormality error across poses; spacing check against a step cap.
  double max_frame_error() const;
  bool spacing_ok(double max_step_mm) const;
};

inline constexpr double kDefaultClearanceMm = 20.0;
inline constexpr double kDefaultMaxStepMm = 25.0;

// Lift a 2D comb stroke to 6-DoF poses: per stroke point, fit a local plane
// in the surrounding window, orient z along the plane normal away from the
// surface (the half-space containing the camera origin), y along the path
// tangent projected into the plane, x = y cross z. An approach pose offset
// along +z precedes the first contact and a retract pose follows the last.
// Depth and plane-fit failures are rethrown with the stroke point index.
ToolTrajectory stroke_to_trajectory(const CombStroke& stroke, const DepthGrid& grid,
                                    const RansacConfig& config,
                                    double approach_clearance,
                                    double retract_clearance, uint64_t rng_seed);

// CSV: idx,px,py,pz,xx,xy,xz,yx,yy,yz,zx,zy,zz
std::string trajectory_to_csv(const ToolTrajectory& trajectory);
void write_trajectory_csv(const ToolTrajectory& trajectory, const std::string& path);

}  // namespace combplan
