#include "combplan/orientation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace combplan {

namespace {
const float kNaN = std::numeric_limits<float>::quiet_NaN();
}

size_t OrientationState::mask_count() const {
  size_t n = 0;
  for (uint8_t m : mask) n += m != 0;
  return n;
}

const Landmark* LandmarkSet::find(const std::string& name) const {
  for (const Landmark& lm : points)
    if (lm.name == name) return &lm;
  return nullptr;
}

// --- similarity fit ---------------------------------------------------------

namespace {

// Largest triangle area over all point triples; 0 for collinear sets.
double max_triangle_area(const std::vector<Vec2>& pts) {
  double best = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      for (size_t k = j + 1; k < pts.size(); ++k) {
        const double area = 0.5 * std::fabs((pts[j] - pts[i]).cross(pts[k] - pts[i]));
        best = std::max(best, area);
      }
  return best;
}

}  // namespace

SimilarityTransform fit_similarity(const LandmarkSet& from, const LandmarkSet& to) {
  // Pair by name, sorted for a deterministic order.
  std::map<std::string, Vec2> to_by_name;
  for (const Landmark& lm : to.points) to_by_name[lm.name] = lm.position;
  if (to_by_name.size() != to.points.size())
    throw AlignmentError("duplicate landmark names");

  std::map<std::string, std::pair<Vec2, Vec2>> pairs;
  for (const Landmark& lm : from.points) {
    const auto it = to_by_name.find(lm.name);
    if (it != to_by_name.end()) pairs[lm.name] = {lm.position, it->second};
  }
  if (pairs.size() < 3)
    throw AlignmentError("alignment underdetermined: fewer than 3 landmark correspondences");

  std::vector<Vec2> src, dst;
  for (const auto& [name, pq] : pairs) {
    src.push_back(pq.first);
    dst.push_back(pq.second);
  }
  if (max_triangle_area(src) < 1e-3 || max_triangle_area(dst) < 1e-3)
    throw AlignmentError("alignment underdetermined: collinear landmarks");

  Vec2 src_mean{0, 0}, dst_mean{0, 0};
  for (size_t i = 0; i < src.size(); ++i) {
    src_mean = src_mean + src[i];
    dst_mean = dst_mean + dst[i];
  }
  const double inv_n = 1.0 / static_cast<double>(src.size());
  src_mean = src_mean * inv_n;
  dst_mean = dst_mean * inv_n;

  double sxx = 0.0, sxy = 0.0, src_sq = 0.0;
  for (size_t i = 0; i < src.size(); ++i) {
    const Vec2 p = src[i] - src_mean;
    const Vec2 q = dst[i] - dst_mean;
    sxx += p.dot(q);
    sxy += p.cross(q);
    src_sq += p.dot(p);
  }

  SimilarityTransform t;
  const double mag = std::sqrt(sxx * sxx + sxy * sxy);
  t.scale = mag / src_sq;
  if (mag > 0.0) {
    t.cos_a = sxx / mag;
    t.sin_a = sxy / mag;
  }
  const Vec2 rotated{t.scale * (t.cos_a * src_mean.x - t.sin_a * src_mean.y),
                     t.scale * (t.sin_a * src_mean.x + t.cos_a * src_mean.y)};
  t.translation = dst_mean - rotated;
  return t;
}

OrientationState align_target(const OrientationState& target_state,
                              const LandmarkSet& target_landmarks,
                              const LandmarkSet& current_landmarks) {
  const SimilarityTransform t = fit_similarity(target_landmarks, current_landmarks);
  const double shift = t.orientation_shift();

  OrientationState out;
  out.width = target_state.width;
  out.height = target_state.height;
  out.orientation.assign(target_state.orientation.size(), kNaN);
  out.mask.assign(target_state.mask.size(), 0);

  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const Vec2 src = t.apply_inverse({static_cast<double>(x), static_cast<double>(y)});
      const int sx = static_cast<int>(std::lround(src.x));
      const int sy = static_cast<int>(std::lround(src.y));
      if (!target_state.masked(sx, sy)) continue;
      const size_t idx = static_cast<size_t>(y) * out.width + x;
      out.mask[idx] = 1;
      out.orientation[idx] =
          static_cast<float>(normalize_angle(target_state.angle_at(sx, sy) + shift));
    }
  }

  std::vector<Vec2> scalp;
  for (const Vec2& p : target_state.scalp_line.points()) scalp.push_back(t.apply(p));
  out.scalp_line = Polyline2D::from_points(std::move(scalp));
  return out;
}

// --- erosion ----------------------------------------------------------------

std::vector<uint8_t> erode_mask(const std::vector<uint8_t>& mask, int width,
                                int height, int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw InvalidParameterError("erode_mask: kernel size must be odd and >= 1");
  if (static_cast<size_t>(width) * height != mask.size())
    throw ShapeError("erode_mask: mask size does not match dimensions");
  if (kernel_size == 1) return mask;

  const int h = kernel_size / 2;

  // Separable: erode rows, then columns. Out-of-bounds counts as unset.
  std::vector<uint8_t> rows(mask.size(), 0);
  for (int y = 0; y < height; ++y) {
    const uint8_t* in = mask.data() + static_cast<size_t>(y) * width;
    uint8_t* out = rows.data() + static_cast<size_t>(y) * width;
    for (int x = h; x < width - h; ++x) {
      uint8_t all = 1;
      for (int dx = -h; dx <= h && all; ++dx) all = in[x + dx];
      out[x] = all;
    }
  }

  std::vector<uint8_t> result(mask.size(), 0);
  for (int y = h; y < height - h; ++y) {
    for (int x = 0; x < width; ++x) {
      uint8_t all = 1;
      for (int dy = -h; dy <= h && all; ++dy)
        all = rows[static_cast<size_t>(y + dy) * width + x];
      result[static_cast<size_t>(y) * width + x] = all;
    }
  }
  return result;
}

OrientationState eroded(const OrientationState& state, int kernel_size) {
  OrientationState out = state;
  out.mask = erode_mask(state.mask, state.width, state.height, kernel_size);
  for (size_t i = 0; i < out.mask.size(); ++i)
    if (!out.mask[i]) out.orientation[i] = kNaN;
  return out;
}

// --- difference --------------------------------------------------------------

DifferenceReport difference_map(const OrientationState& current,
                                const OrientationState& aligned_target,
                                double absent_mask_penalty) {
  if (current.width != aligned_target.width || current.height != aligned_target.height)
    throw ShapeError("difference_map: grid dimensions differ");

  DifferenceReport report;
  report.width = current.width;
  report.height = current.height;
  report.delta.assign(current.orientation.size(), kNaN);
  report.absent_target.assign(current.orientation.size(), 0);

  double sum = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < current.mask.size(); ++i) {
    const bool cur = current.mask[i] != 0;
    const bool tgt = aligned_target.mask[i] != 0;
    if (cur != tgt) ++report.coverage_penalty_count;
    if (!cur) continue;
    const double d = tgt ? angle_difference(current.orientation[i],
                                            aligned_target.orientation[i])
                         : absent_mask_penalty;
    const float stored = static_cast<float>(d);
    report.delta[i] = stored;
    report.absent_target[i] = tgt ? 0 : 1;
    sum += stored;  // mean is the exact mean of the stored grid
    ++count;
  }
  report.mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return report;
}

// --- file formats -------------------------------------------------------------

namespace {

uint32_t float_to_le(float f) {
  uint32_t u;
  std::memcpy(&u, &f, 4);
  if constexpr (std::endian::native == std::endian::big)
    u = __builtin_bswap32(u);
  return u;
}

float le_to_float(uint32_t u) {
  if constexpr (std::endian::native == std::endian::big)
    u = __builtin_bswap32(u);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

void write_orientation_file(const OrientationState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "ORIENT v1 " << state.width << " " << state.height << "\n";

  std::vector<uint32_t> buf(state.orientation.size());
  for (size_t i = 0; i < state.orientation.size(); ++i) {
    const float v = state.mask[i] ? state.orientation[i] : kNaN;
    buf[i] = float_to_le(v);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * 4));

  char num[64];
  bool first = true;
  for (const Vec2& p : state.scalp_line.points()) {
    std::snprintf(num, sizeof(num), "%.10g,%.10g", p.x, p.y);
    out << (first ? "" : " ") << num;
    first = false;
  }
  out << "\n";
  if (!out) throw IoError("write failed: " + path);
}

OrientationState read_orientation_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, version;
  int width = 0, height = 0;
  hs >> magic >> version >> width >> height;
  if (magic != "ORIENT" || version != "v1" || width <= 0 || height <= 0)
    throw IoError("bad ORIENT header in " + path);

  OrientationState state;
  state.width = width;
  state.height = height;
  const size_t n = static_cast<size_t>(width) * height;
  std::vector<uint32_t> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
  if (!in) throw IoError("truncated orientation data in " + path);

  state.orientation.resize(n);
  state.mask.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const float v = le_to_float(buf[i]);
    state.orientation[i] = v;
    state.mask[i] = std::isnan(v) ? 0 : 1;
  }

  std::string scalp_line;
  std::getline(in, scalp_line);
  std::vector<Vec2> scalp;
  std::istringstream ss(scalp_line);
  std::string pair;
  while (ss >> pair) {
    const size_t comma = pair.find(',');
    if (comma == std::string::npos) throw IoError("bad scalp point in " + path);
    scalp.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
  }
  if (scalp.size() < 2) throw IoError("missing scalp polyline in " + path);
  state.scalp_line = Polyline2D::from_points(std::move(scalp));
  return state;
}

void write_difference_ppm(const DifferenceReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P6\n" << report.width << " " << report.height << "\n255\n";

  std::vector<uint8_t> rgb(static_cast<size_t>(report.width) * report.height * 3, 0);
  for (size_t i = 0; i < report.delta.size(); ++i) {
    const float d = report.delta[i];
    if (std::isnan(d)) continue;
    const double t = std::clamp(static_cast<double>(d) / kPi, 0.0, 1.0);
    rgb[i * 3 + 0] = static_cast<uint8_t>(std::lround(255.0 * t));
    rgb[i * 3 + 2] = static_cast<uint8_t>(std::lround(255.0 * (1.0 - t)));
  }
  out.write(reinterpret_cast<const char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace combplan
