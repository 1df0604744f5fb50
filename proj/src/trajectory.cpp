#include "combplan/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <Eigen/Dense>

#include "combplan/random.hpp"

namespace combplan {

Vec3 lift_point(const DepthGrid& grid, const Vec2& pixel) {
  const int px = static_cast<int>(std::lround(pixel.x));
  const int py = static_cast<int>(std::lround(pixel.y));

  double depth = std::numeric_limits<double>::quiet_NaN();
  if (grid.defined(px, py)) {
    depth = grid.depth_at(px, py);
  } else {
    // Nearest defined depth within 3 px of the requested pixel.
    double best = std::numeric_limits<double>::infinity();
    for (int dy = -3; dy <= 3; ++dy)
      for (int dx = -3; dx <= 3; ++dx) {
        if (!grid.defined(px + dx, py + dy)) continue;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= 9.0 && d2 < best) {
          best = d2;
          depth = grid.depth_at(px + dx, py + dy);
        }
      }
  }
  if (std::isnan(depth)) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "no depth within 3 px of pixel (%d, %d)", px, py);
    throw DepthHoleError(msg);
  }

  const Intrinsics& in = grid.intrinsics;
  return {(pixel.x - in.cx) * in.sx, (pixel.y - in.cy) * in.sy, depth};
}

namespace {

// Unit normal convention: c >= 0, ties broken by b then a.
Plane3D canonical_plane(Vec3 n, double d) {
  const double len = n.norm();
  n = n * (1.0 / len);
  d /= len;
  bool flip = false;
  if (n.z < 0.0) {
    flip = true;
  } else if (n.z == 0.0) {
    if (n.y < 0.0)
      flip = true;
    else if (n.y == 0.0 && n.x < 0.0)
      flip = true;
  }
  if (flip) {
    n = n * -1.0;
    d = -d;
  }
  return Plane3D{n.x, n.y, n.z, d};
}

// Least-squares plane through a point set: centroid plus the smallest
// eigenvector of the scatter matrix.
bool fit_plane_lsq(std::span<const Vec3> pts, std::span<const size_t> idx,
                   Plane3D* out) {
  Vec3 c{0, 0, 0};
  for (size_t i : idx) c = c + pts[i];
  c = c * (1.0 / static_cast<double>(idx.size()));

  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (size_t i : idx) {
    const Vec3 q = pts[i] - c;
    const Eigen::Vector3d v(q.x, q.y, q.z);
    scatter += v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
  const Eigen::Vector3d n = solver.eigenvectors().col(0);
  if (!n.allFinite() || n.norm() < 1e-12) return false;
  const Vec3 normal{n.x(), n.y(), n.z()};
  *out = canonical_plane(normal, -normal.dot(c));
  return true;
}

}  // namespace

Plane3D ransac_plane(std::span<const Vec3> points, int iterations,
                     double inlier_tol, uint64_t rng_seed) {
  if (points.size() < 3)
    throw PlaneFitError("ransac_plane: need at least 3 points");
  if (iterations < 1 || inlier_tol <= 0.0)
    throw InvalidParameterError("ransac_plane: bad iterations or tolerance");

  Rng rng(rng_seed);
  const size_t n = points.size();

  size_t best_count = 0;
  Vec3 best_normal{0, 0, 1};
  double best_d = 0.0;

  for (int it = 0; it < iterations; ++it) {
    size_t a = rng.uniform_index(n);
    size_t b = rng.uniform_index(n);
    size_t c = rng.uniform_index(n);
    if (a == b || b == c || a == c) continue;

    const Vec3 normal = (points[b] - points[a]).cross(points[c] - points[a]);
    const double len = normal.norm();
    if (len < 1e-9) continue;  // collinear sample
    const Vec3 un = normal * (1.0 / len);
    const double d = -un.dot(points[a]);

    size_t count = 0;
    for (const Vec3& p : points)
      if (std::fabs(un.dot(p) + d) <= inlier_tol) ++count;

    if (count > best_count) {
      best_count = count;
      best_normal = un;
      best_d = d;
    }
  }

  if (best_count < 3)
    throw PlaneFitError("ransac_plane: no valid plane hypothesis found");

  std::vector<size_t> inliers;
  for (size_t i = 0; i < n; ++i)
    if (std::fabs(best_normal.dot(points[i]) + best_d) <= inlier_tol)
      inliers.push_back(i);

  Plane3D refined{};
  if (fit_plane_lsq(points, inliers, &refined)) return refined;
  return canonical_plane(best_normal, best_d);
}

double ToolTrajectory::max_frame_error() const {
  double e = 0.0;
  for (const Frame3D& f : poses) e = std::max(e, f.orthonormality_error());
  return e;
}

bool ToolTrajectory::spacing_ok(double max_step_mm) const {
  for (size_t i = 1; i < poses.size(); ++i)
    if ((poses[i].origin - poses[i - 1].origin).norm() > max_step_mm) return false;
  return true;
}

ToolTrajectory stroke_to_trajectory(const CombStroke& stroke, const DepthGrid& grid,
                                    const RansacConfig& config,
                                    double approach_clearance,
                                    double retract_clearance, uint64_t rng_seed) {
  const std::vector<Vec2>& path = stroke.path.points();
  const int half = config.window / 2;

  // Lift the whole path first; tangents come from the 3D points.
  std::vector<Vec3> lifted;
  lifted.reserve(path.size());
  for (size_t i = 0; i < path.size(); ++i) {
    try {
      lifted.push_back(lift_point(grid, path[i]));
    } catch (const DepthHoleError& e) {
      throw DepthHoleError(std::string(e.what()) + " (stroke point " +
                           std::to_string(i) + ")");
    }
  }

  ToolTrajectory traj;
  traj.approach_clearance = approach_clearance;
  traj.retract_clearance = retract_clearance;
  traj.poses.reserve(path.size() + 2);

  for (size_t i = 0; i < path.size(); ++i) {
    const int cx = static_cast<int>(std::lround(path[i].x));
    const int cy = static_cast<int>(std::lround(path[i].y));

    std::vector<Vec3> window_pts;
    for (int dy = -half; dy <= half; ++dy)
      for (int dx = -half; dx <= half; ++dx) {
        if (!grid.defined(cx + dx, cy + dy)) continue;
        const Vec2 px{static_cast<double>(cx + dx), static_cast<double>(cy + dy)};
        const Intrinsics& in = grid.intrinsics;
        window_pts.push_back({(px.x - in.cx) * in.sx, (px.y - in.cy) * in.sy,
                              grid.depth_at(cx + dx, cy + dy)});
      }

    Plane3D plane{};
    try {
      plane = ransac_plane(window_pts, config.iterations, config.inlier_tol,
                           Rng::mix(rng_seed, i));
    } catch (const PlaneFitError& e) {
      throw PlaneFitError(std::string(e.what()) + " (stroke point " +
                          std::to_string(i) + ")");
    }

    // z points away from the surface: the half-space holding the camera
    // origin, i.e. signed distance of the origin is positive.
    Vec3 z = plane.normal();
    if (plane.d < 0.0) z = z * -1.0;

    const size_t prev = i > 0 ? i - 1 : i;
    const size_t next = i + 1 < path.size() ? i + 1 : i;
    const Vec3 tangent = lifted[next] - lifted[prev];

    traj.poses.push_back(build_frame(lifted[i], tangent, z));
  }

  const Frame3D& first = traj.poses.front();
  const Frame3D& last = traj.poses.back();
  Frame3D approach = first;
  approach.origin = first.origin + first.z * approach_clearance;
  Frame3D retract = last;
  retract.origin = last.origin + last.z * retract_clearance;
  traj.poses.insert(traj.poses.begin(), approach);
  traj.poses.push_back(retract);
  return traj;
}

std::string trajectory_to_csv(const ToolTrajectory& trajectory) {
  std::string out = "idx,px,py,pz,xx,xy,xz,yx,yy,yz,zx,zy,zz\n";
  char line[512];
  for (size_t i = 0; i < trajectory.poses.size(); ++i) {
    const Frame3D& f = trajectory.poses[i];
    std::snprintf(line, sizeof(line),
                  "%zu,%.6f,%.6f,%.6f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n",
                  i, f.origin.x, f.origin.y, f.origin.z, f.x.x, f.x.y, f.x.z,
                  f.y.x, f.y.y, f.y.z, f.z.x, f.z.y, f.z.z);
    out += line;
  }
  return out;
}

void write_trajectory_csv(const ToolTrajectory& trajectory, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << trajectory_to_csv(trajectory);
}

}  // namespace combplan
