#include "combplan/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace combplan {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n < 1e-12) throw InvalidParameterError("cannot normalize near-zero vector");
  return {x / n, y / n, z / n};
}

double normalize_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double angle_of(const Vec2& dir) {
  return normalize_angle(std::atan2(-dir.y, dir.x));
}

double angle_difference(double theta_a, double theta_b) {
  const double a = normalize_angle(theta_a);
  const double b = normalize_angle(theta_b);
  double d = std::fabs(a - b);
  if (d > kPi) d -= kPi;
  return d;
}

double signed_angle_delta(double from, double to) {
  double d = std::fmod(to - from, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

// --- Polyline2D -----------------------------------------------------------

Polyline2D Polyline2D::from_points(std::vector<Vec2> pts) {
  std::vector<Vec2> kept;
  kept.reserve(pts.size());
  for (const Vec2& p : pts) {
    if (!kept.empty() && kept.back().x == p.x && kept.back().y == p.y) continue;
    kept.push_back(p);
  }
  if (kept.size() < 2)
    throw InvalidParameterError("polyline needs at least 2 distinct points");
  return Polyline2D(std::move(kept));
}

Polyline2D::Polyline2D(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  rebuild_cumulative();
}

void Polyline2D::rebuild_cumulative() {
  cum_.resize(pts_.size());
  cum_[0] = 0.0;
  for (size_t i = 1; i < pts_.size(); ++i)
    cum_[i] = cum_[i - 1] + (pts_[i] - pts_[i - 1]).norm();
}

double Polyline2D::arc_length() const { return cum_.back(); }

Vec2 Polyline2D::point_at_arc(double s) const {
  if (s <= 0.0) return pts_.front();
  if (s >= cum_.back()) return pts_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const size_t i = static_cast<size_t>(it - cum_.begin());  // cum_[i-1] <= s < cum_[i]
  const double seg = cum_[i] - cum_[i - 1];
  const double t = (s - cum_[i - 1]) / seg;
  return pts_[i - 1] + (pts_[i] - pts_[i - 1]) * t;
}

Vec2 Polyline2D::point_at_arc_extended(double s) const {
  if (s < 0.0) {
    const Vec2 d = tangent_at_arc(0.0);
    return pts_.front() + d * s;
  }
  if (s > cum_.back()) {
    const Vec2 d = tangent_at_arc(cum_.back());
    return pts_.back() + d * (s - cum_.back());
  }
  return point_at_arc(s);
}

Vec2 Polyline2D::tangent_at_arc(double s) const {
  size_t i;
  if (s <= 0.0) {
    i = 1;
  } else if (s >= cum_.back()) {
    i = pts_.size() - 1;
  } else {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    i = static_cast<size_t>(it - cum_.begin());
  }
  const Vec2 d = pts_[i] - pts_[i - 1];
  const double n = d.norm();
  return {d.x / n, d.y / n};
}

Polyline2D Polyline2D::resampled(size_t n) const {
  if (n < 2) throw InvalidParameterError("resample needs n >= 2");
  std::vector<Vec2> out;
  out.reserve(n);
  const double total = arc_length();
  for (size_t i = 0; i < n; ++i)
    out.push_back(point_at_arc(total * static_cast<double>(i) / static_cast<double>(n - 1)));
  // A path that revisits its own coordinates could collapse two samples
  // onto one point; the fixed point count is part of the contract.
  for (size_t i = 1; i < out.size(); ++i)
    if (out[i].x == out[i - 1].x && out[i].y == out[i - 1].y)
      throw InvalidParameterError("resample collapsed on a self-revisiting path");
  return Polyline2D(std::move(out));
}

Polyline2D Polyline2D::reversed() const {
  std::vector<Vec2> rev(pts_.rbegin(), pts_.rend());
  return Polyline2D(std::move(rev));
}

static double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                                     double* t_out) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (t_out) *t_out = t;
  const Vec2 q = a + ab * t;
  return (p - q).norm();
}

double Polyline2D::distance_to(const Vec2& p) const {
  double best = point_segment_distance(p, pts_[0], pts_[1], nullptr);
  for (size_t i = 2; i < pts_.size(); ++i)
    best = std::min(best, point_segment_distance(p, pts_[i - 1], pts_[i], nullptr));
  return best;
}

double Polyline2D::nearest_arc(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  double best_arc = 0.0;
  for (size_t i = 1; i < pts_.size(); ++i) {
    double t;
    const double d = point_segment_distance(p, pts_[i - 1], pts_[i], &t);
    if (d < best) {
      best = d;
      best_arc = cum_[i - 1] + t * (cum_[i] - cum_[i - 1]);
    }
  }
  return best_arc;
}

// --- Bezier fit -----------------------------------------------------------

namespace {

inline double bez0(double t) { const double u = 1.0 - t; return u * u * u; }
inline double bez1(double t) { const double u = 1.0 - t; return 3.0 * t * u * u; }
inline double bez2(double t) { const double u = 1.0 - t; return 3.0 * t * t * u; }
inline double bez3(double t) { return t * t * t; }

Vec2 eval_cubic(const Vec2& b0, const Vec2& b1, const Vec2& b2, const Vec2& b3,
                double t) {
  return b0 * bez0(t) + b1 * bez1(t) + b2 * bez2(t) + b3 * bez3(t);
}

}  // namespace

Polyline2D fit_bezier(const Polyline2D& raw, size_t samples) {
  if (samples < 2) throw InvalidParameterError("fit_bezier needs samples >= 2");

  const std::vector<Vec2>& q = raw.points();
  const size_t n = q.size();
  const Vec2 b0 = q.front();
  const Vec2 b3 = q.back();

  // Chord-length parameters.
  std::vector<double> t(n, 0.0);
  double total = 0.0;
  for (size_t i = 1; i < n; ++i) {
    total += (q[i] - q[i - 1]).norm();
    t[i] = total;
  }
  for (size_t i = 0; i < n; ++i) t[i] /= total;

  // Normal equations for the two interior control points, endpoints fixed.
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;
  Vec2 r1{0.0, 0.0}, r2{0.0, 0.0};
  for (size_t i = 0; i < n; ++i) {
    const double a1 = bez1(t[i]);
    const double a2 = bez2(t[i]);
    const Vec2 rhs = q[i] - b0 * bez0(t[i]) - b3 * bez3(t[i]);
    s11 += a1 * a1;
    s12 += a1 * a2;
    s22 += a2 * a2;
    r1 = r1 + rhs * a1;
    r2 = r2 + rhs * a2;
  }

  Vec2 b1, b2;
  const double det = s11 * s22 - s12 * s12;
  if (std::fabs(det) < 1e-12 * std::max(1.0, s11 * s22)) {
    // Underdetermined (2-point input and the like): straight chord.
    const Vec2 chord = b3 - b0;
    b1 = b0 + chord * (1.0 / 3.0);
    b2 = b0 + chord * (2.0 / 3.0);
  } else {
    b1 = {(r1.x * s22 - r2.x * s12) / det, (r1.y * s22 - r2.y * s12) / det};
    b2 = {(r2.x * s11 - r1.x * s12) / det, (r2.y * s11 - r1.y * s12) / det};
  }

  std::vector<Vec2> out;
  out.reserve(samples);
  for (size_t i = 0; i < samples; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(samples - 1);
    out.push_back(eval_cubic(b0, b1, b2, b3, u));
  }
  out.front() = b0;
  out.back() = b3;
  return Polyline2D::from_points(std::move(out));
}

// --- frames ---------------------------------------------------------------

double Frame3D::orthonormality_error() const {
  double e = 0.0;
  e = std::max(e, std::fabs(x.norm() - 1.0));
  e = std::max(e, std::fabs(y.norm() - 1.0));
  e = std::max(e, std::fabs(z.norm() - 1.0));
  e = std::max(e, std::fabs(x.dot(y)));
  e = std::max(e, std::fabs(y.dot(z)));
  e = std::max(e, std::fabs(z.dot(x)));
  e = std::max(e, (x - y.cross(z)).norm());
  return e;
}

Frame3D build_frame(const Vec3& origin, const Vec3& tangent, const Vec3& normal) {
  const double tn = tangent.norm();
  const double nn = normal.norm();
  if (tn < 1e-12 || nn < 1e-12)
    throw DegenerateFrameError("build_frame: zero-length tangent or normal");

  const Vec3 z = normal * (1.0 / nn);
  const Vec3 in_plane = tangent - z * tangent.dot(z);
  // |in_plane| / |tangent| = sin(angle between tangent and normal)
  if (in_plane.norm() / tn < 1e-6) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "build_frame: tangent (%g, %g, %g) parallel to normal (%g, %g, %g)",
                  tangent.x, tangent.y, tangent.z, normal.x, normal.y, normal.z);
    throw DegenerateFrameError(msg);
  }
  const Vec3 y = in_plane * (1.0 / in_plane.norm());
  const Vec3 x = y.cross(z);
  return Frame3D{origin, x, y, z};
}

}  // namespace combplan
