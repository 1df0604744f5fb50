#pragma once

#include <cmath>
#include <vector>

#include "combplan/errors.hpp"

namespace combplan {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec3 normalized() const;
};

// --- angles ------------------------------------------------------------
//
// Orientations are directed angles in [0, 2pi), measured counterclockwise
// from +x in the usual math convention. Image rows grow downward, so the
// pixel-space direction of an angle t is (cos t, -sin t): 270 degrees points
// down the image.

double normalize_angle(double radians);

// Directed angle -> pixel-space unit direction (y axis down).
inline Vec2 direction_of(double radians) {
  return {std::cos(radians), -std::sin(radians)};
}

// Pixel-space direction -> directed angle in [0, 2pi).
double angle_of(const Vec2& dir);

// Orientation difference per the root-adjustment rule: take the plain
// absolute difference of the two normalized angles and, when it exceeds pi,
// subtract pi. Result lies in [0, pi] and is 0 only for equal angles.
// (Deliberately not the circular metric min(d, 2pi - d).)
double angle_difference(double theta_a, double theta_b);

// Signed smallest rotation from `from` to `to`, in (-pi, pi].
double signed_angle_delta(double from, double to);

// --- polylines ----------------------------------------------------------

// Ordered 2D polyline in pixel space. At least two points, no two
// consecutive points identical, positive arc length.
class Polyline2D {
 public:
  // Drops exactly-repeated consecutive points; throws InvalidParameterError
  // if fewer than 2 distinct points remain.
  static Polyline2D from_points(std::vector<Vec2> pts);

  const std::vector<Vec2>& points() const { return pts_; }
  size_t size() const { return pts_.size(); }
  const Vec2& front() const { return pts_.front(); }
  const Vec2& back() const { return pts_.back(); }

  double arc_length() const;

  // Point at arc-length position s, clamped to [0, length].
  Vec2 point_at_arc(double s) const;

  // Point at arc-length position s; positions past the end continue along
  // the final segment direction (and before the start along the first).
  Vec2 point_at_arc_extended(double s) const;

  // Unit tangent of the segment containing arc position s (clamped).
  Vec2 tangent_at_arc(double s) const;

  // Uniform arc-length resampling to n >= 2 points.
  Polyline2D resampled(size_t n) const;

  Polyline2D reversed() const;

  // Distance from p to the nearest point on the polyline.
  double distance_to(const Vec2& p) const;

  // Arc-length position of the point on the polyline nearest to p.
  double nearest_arc(const Vec2& p) const;

 private:
  explicit Polyline2D(std::vector<Vec2> pts);
  void rebuild_cumulative();

  std::vector<Vec2> pts_;
  std::vector<double> cum_;  // cumulative arc length, cum_[0] = 0
};

// Least-squares cubic Bezier fit under chord-length parameterization,
// endpoints interpolated exactly, evaluated at `samples` uniform parameter
// values. Degenerate fits (2 points, coincident parameters) fall back to
// the straight chord.
Polyline2D fit_bezier(const Polyline2D& raw, size_t samples);

// --- 3D frames and planes ------------------------------------------------

// Right-handed orthonormal frame: x = y cross z.
struct Frame3D {
  Vec3 origin;
  Vec3 x, y, z;

  // Max deviation from orthonormality/right-handedness, for validation.
  double orthonormality_error() const;
};

// Plane a*x + b*y + c*z + d = 0 with unit normal (a, b, c).
struct Plane3D {
  double a = 0.0, b = 0.0, c = 1.0, d = 0.0;

  double signed_distance(const Vec3& p) const {
    return a * p.x + b * p.y + c * p.z + d;
  }
  Vec3 normal() const { return {a, b, c}; }
};

// Frame with z = unit normal, y = tangent projected into the plane normal
// to z, x = y cross z. Throws DegenerateFrameError when tangent and normal
// are parallel (angle below ~1e-6 rad).
Frame3D build_frame(const Vec3& origin, const Vec3& tangent, const Vec3& normal);

}  // namespace combplan
