#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combplan/orientation.hpp"
#include "combplan/planner.hpp"
#include "combplan/tracing.hpp"
#include "combplan/trajectory.hpp"

namespace combplan {

// Half-ellipsoid head surface on a pixel grid, 1 px = 1 mm by default.
struct HeadParams {
  int width = 256;
  int height = 256;
  double cx = 128.0, cy = 128.0;  // ellipsoid center, px
  double rx = 112.0, ry = 124.0;  // in-image radii, px
  double rz = 80.0;               // bulge toward the camera, mm
  double base_depth = 200.0;      // depth of the ellipsoid equator, mm
  double hairline_y = 83.0;       // scalp line row, px
  double scalp_half_width = 56.0;
  int scalp_samples = 29;
};

struct HeadModel {
  int width = 0;
  int height = 0;
  DepthGrid depth;
  Polyline2D scalp_line = Polyline2D::from_points({{0.0, 0.0}, {1.0, 0.0}});
  LandmarkSet landmarks;
};

HeadModel make_head(const HeadParams& params = {});

// Analytic outward (toward-camera) surface normal of the head ellipsoid at a
// lifted surface point; reference for trajectory orientation checks.
Vec3 head_surface_normal(const HeadParams& params, const Vec3& point_mm);

struct FieldParams {
  int strand_count = 113;
  double strand_length = 70.0;  // px
  double point_spacing = 3.0;   // px between strand points
  double stiffness = 0.0;       // per-strand default, [0, 1]
  double sweep_angle = 0.611;   // parted-style tilt away from the part, rad
};

// Mutable hair state: strands rooted on the scalp line.
struct StrandField {
  std::vector<Strand> strands;
  std::vector<double> stiffness;  // parallel to strands
};

struct StyleScenario {
  std::string name;
  std::string description;
  StrandField target_field;
};

// Everything combed straight down (270 degrees).
StrandField make_natural_field(const HeadModel& head, const FieldParams& params);

// Strands part at the given scalp arc-length fraction and flow away from it.
StrandField make_parted_field(const HeadModel& head, const FieldParams& params,
                              double part_fraction);

// Start-of-trial state: straight down plus seeded per-strand tilt. Most
// strands get small Gaussian jitter; a small fraction are strays with a
// larger tilt so there is always something worth combing.
struct InitialJitter {
  double base_sigma = 0.012;   // rad
  double stray_fraction = 0.035;
  double stray_min = 0.35;  // rad
  double stray_max = 0.65;
};

StrandField make_initial_field(const HeadModel& head, const FieldParams& params,
                               const InitialJitter& jitter, uint64_t seed);

// The three built-in targets: natural, 5:5 parting, 7:3 parting.
std::vector<StyleScenario> builtin_scenarios(const HeadModel& head,
                                             const FieldParams& params);

// Rasterize strands as thick polylines: each covered pixel takes the local
// root-to-tip tangent direction of the nearest segment; later strands in
// list order win overlaps. Mask = union of footprints.
OrientationState render(const HeadModel& head, const StrandField& field,
                        double rasterize_width);

// Simulated comb pass: strands whose roots lie within catch_width/2 of the
// stroke path are re-laid along the stroke's direction profile (taken from
// the nearest stroke point onward), blended into the old directions by
// compliance * (1 - stiffness), scaled by a tooth profile that fades from
// full grip under the stroke to zero at the swath edge, with per-point
// Gaussian angular noise. Roots stay anchored and per-segment lengths are
// reused, so arc length is preserved. Strands outside the swath are
// untouched.
StrandField apply_stroke(const StrandField& field, const CombStroke& stroke,
                         double catch_width, double compliance,
                         double noise_sigma, uint64_t rng_seed);

}  // namespace combplan
