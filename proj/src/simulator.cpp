#include "combplan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "combplan/random.hpp"

namespace combplan {

namespace {
const float kNaN = std::numeric_limits<float>::quiet_NaN();
constexpr double kDownAngle = 1.5 * kPi;  // 270 degrees: straight down
}  // namespace

HeadModel make_head(const HeadParams& p) {
  HeadModel head;
  head.width = p.width;
  head.height = p.height;

  head.depth.width = p.width;
  head.depth.height = p.height;
  head.depth.intrinsics = {1.0, 1.0, p.cx, p.cy};
  head.depth.depth.assign(static_cast<size_t>(p.width) * p.height, kNaN);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const double ex = (x - p.cx) / p.rx;
      const double ey = (y - p.cy) / p.ry;
      const double e = 1.0 - ex * ex - ey * ey;
      if (e <= 0.0) continue;
      head.depth.depth[static_cast<size_t>(y) * p.width + x] =
          static_cast<float>(p.base_depth - p.rz * std::sqrt(e));
    }
  }

  std::vector<Vec2> scalp;
  const int n = std::max(2, p.scalp_samples);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    scalp.push_back({p.cx - p.scalp_half_width + 2.0 * p.scalp_half_width * t,
                     p.hairline_y});
  }
  head.scalp_line = Polyline2D::from_points(std::move(scalp));

  head.landmarks.points = {
      {"eye_left", {p.cx - 35.0, p.cy + 22.0}},
      {"eye_right", {p.cx + 35.0, p.cy + 22.0}},
      {"nose", {p.cx, p.cy + 57.0}},
      {"chin", {p.cx, p.cy + 87.0}},
  };
  return head;
}

Vec3 head_surface_normal(const HeadParams& p, const Vec3& point_mm) {
  // Gradient of the implicit ellipsoid; Z below base_depth faces the camera.
  const Vec3 g{2.0 * point_mm.x / (p.rx * p.rx), 2.0 * point_mm.y / (p.ry * p.ry),
               2.0 * (point_mm.z - p.base_depth) / (p.rz * p.rz)};
  return g.normalized();
}

namespace {

Strand straight_strand(const Vec2& root, double angle, double length, double spacing) {
  const Vec2 dir = direction_of(angle);
  std::vector<Vec2> pts{root};
  for (double s = spacing; s < length; s += spacing) pts.push_back(root + dir * s);
  pts.push_back(root + dir * length);
  return Strand::from_path(Polyline2D::from_points(std::move(pts)));
}

std::vector<Vec2> scalp_roots(const HeadModel& head, int count) {
  const double total = head.scalp_line.arc_length();
  std::vector<Vec2> roots;
  roots.reserve(count);
  for (int i = 0; i < count; ++i)
    roots.push_back(head.scalp_line.point_at_arc(
        total * static_cast<double>(i) / static_cast<double>(count - 1)));
  return roots;
}

}  // namespace

StrandField make_natural_field(const HeadModel& head, const FieldParams& params) {
  StrandField field;
  for (const Vec2& root : scalp_roots(head, params.strand_count)) {
    field.strands.push_back(straight_strand(root, kDownAngle, params.strand_length,
                                            params.point_spacing));
    field.stiffness.push_back(params.stiffness);
  }
  return field;
}

StrandField make_parted_field(const HeadModel& head, const FieldParams& params,
                              double part_fraction) {
  StrandField field;
  const double total = head.scalp_line.arc_length();
  const std::vector<Vec2> roots = scalp_roots(head, params.strand_count);
  for (int i = 0; i < params.strand_count; ++i) {
    const double u = (total * i / (params.strand_count - 1)) / total;
    // Left of the part flows down-left, right of it down-right.
    const double angle = u < part_fraction ? kDownAngle - params.sweep_angle
                                           : kDownAngle + params.sweep_angle;
    field.strands.push_back(straight_strand(roots[static_cast<size_t>(i)], angle,
                                            params.strand_length, params.point_spacing));
    field.stiffness.push_back(params.stiffness);
  }
  return field;
}

StrandField make_initial_field(const HeadModel& head, const FieldParams& params,
                               const InitialJitter& jitter, uint64_t seed) {
  StrandField field;
  Rng rng(Rng::mix(seed, 0x1217));
  for (const Vec2& root : scalp_roots(head, params.strand_count)) {
    double tilt;
    if (rng.uniform() < jitter.stray_fraction) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      tilt = sign * rng.uniform(jitter.stray_min, jitter.stray_max);
    } else {
      tilt = rng.normal(0.0, jitter.base_sigma);
    }
    field.strands.push_back(straight_strand(root, normalize_angle(kDownAngle + tilt),
                                            params.strand_length, params.point_spacing));
    field.stiffness.push_back(params.stiffness);
  }
  return field;
}

std::vector<StyleScenario> builtin_scenarios(const HeadModel& head,
                                             const FieldParams& params) {
  std::vector<StyleScenario> scenarios;
  scenarios.push_back({"natural", "all strands combed straight down",
                       make_natural_field(head, params)});
  scenarios.push_back({"5to5", "5:5 parting at the scalp midpoint",
                       make_parted_field(head, params, 0.5)});
  scenarios.push_back({"7to3", "7:3 parting at 70% of the scalp width",
                       make_parted_field(head, params, 0.7)});
  return scenarios;
}

OrientationState render(const HeadModel& head, const StrandField& field,
                        double rasterize_width) {
  OrientationState state;
  state.width = head.width;
  state.height = head.height;
  state.orientation.assign(static_cast<size_t>(head.width) * head.height, kNaN);
  state.mask.assign(state.orientation.size(), 0);
  state.scalp_line = head.scalp_line;

  const double r = rasterize_width / 2.0;

  // Per strand: nearest-segment tangent per covered pixel, then written over
  // whatever earlier strands put there.
  std::unordered_map<size_t, std::pair<double, float>> covered;
  for (const Strand& strand : field.strands) {
    covered.clear();
    const std::vector<Vec2>& pts = strand.path.points();
    for (size_t i = 1; i < pts.size(); ++i) {
      const Vec2& a = pts[i - 1];
      const Vec2& b = pts[i];
      const float angle = static_cast<float>(angle_of(b - a));

      const int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) - r));
      const int x1 = static_cast<int>(std::ceil(std::max(a.x, b.x) + r));
      const int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) - r));
      const int y1 = static_cast<int>(std::ceil(std::max(a.y, b.y) + r));

      const Vec2 ab = b - a;
      const double len2 = ab.dot(ab);
      for (int y = std::max(0, y0); y <= std::min(head.height - 1, y1); ++y)
        for (int x = std::max(0, x0); x <= std::min(head.width - 1, x1); ++x) {
          const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
          double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          const double d = (p - (a + ab * t)).norm();
          if (d > r) continue;
          const size_t idx = static_cast<size_t>(y) * head.width + x;
          const auto it = covered.find(idx);
          if (it == covered.end() || d < it->second.first)
            covered[idx] = {d, angle};
        }
    }
    for (const auto& [idx, da] : covered) {
      state.orientation[idx] = da.second;
      state.mask[idx] = 1;
    }
  }
  return state;
}

StrandField apply_stroke(const StrandField& field, const CombStroke& stroke,
                         double catch_width, double compliance,
                         double noise_sigma, uint64_t rng_seed) {
  if (compliance < 0.0 || compliance > 1.0)
    throw InvalidParameterError("apply_stroke: compliance must be in [0, 1]");

  StrandField out = field;
  Rng rng(rng_seed);

  for (size_t si = 0; si < field.strands.size(); ++si) {
    const Strand& strand = field.strands[si];
    if (compliance * (1.0 - field.stiffness[si]) <= 0.0) continue;
    const double root_dist = stroke.path.distance_to(strand.root);
    const double half = catch_width / 2.0;
    if (root_dist > half) continue;

    // Soft tooth profile: full grip under the stroke center, fading to
    // nothing at the swath edge.
    const double grip = 1.0 - root_dist / half;
    const double blend = compliance * (1.0 - field.stiffness[si]) * grip;
    if (blend <= 0.0) continue;

    const double s0 = stroke.path.nearest_arc(strand.root);
    const std::vector<Vec2>& old_pts = strand.path.points();

    // Root stays anchored; per-segment lengths are kept and directions are
    // blended toward the stroke's direction profile, so arc length is
    // preserved exactly.
    std::vector<Vec2> new_pts;
    new_pts.reserve(old_pts.size());
    new_pts.push_back(strand.root);
    double cum = 0.0;
    for (size_t j = 1; j < old_pts.size(); ++j) {
      const Vec2 seg = old_pts[j] - old_pts[j - 1];
      const double len = seg.norm();
      const double old_angle = angle_of(seg);
      double target = angle_of(stroke.path.tangent_at_arc(s0 + cum));
      if (noise_sigma > 0.0) target += rng.normal(0.0, noise_sigma);
      const double blended = old_angle + blend * signed_angle_delta(old_angle, target);
      new_pts.push_back(new_pts.back() + direction_of(blended) * len);
      cum += len;
    }
    out.strands[si] = Strand::from_path(Polyline2D::from_points(std::move(new_pts)));
  }
  return out;
}

}  // namespace combplan
