#include "combplan/tracing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace combplan {

namespace {

bool position_masked(const OrientationState& state, const Vec2& p) {
  return state.masked(static_cast<int>(std::lround(p.x)),
                      static_cast<int>(std::lround(p.y)));
}

// Bilinear blend of the per-pixel direction vectors over masked neighbors.
// Fails near conflicting orientations (vectors cancelling) or off the mask.
bool sample_direction(const OrientationState& state, const Vec2& p, Vec2* dir) {
  const int x0 = static_cast<int>(std::floor(p.x));
  const int y0 = static_cast<int>(std::floor(p.y));
  const double fx = p.x - x0;
  const double fy = p.y - y0;

  const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
  const int ox[4] = {0, 1, 0, 1};
  const int oy[4] = {0, 0, 1, 1};

  Vec2 acc{0.0, 0.0};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int x = x0 + ox[i];
    const int y = y0 + oy[i];
    if (!state.masked(x, y)) continue;
    const Vec2 d = direction_of(state.angle_at(x, y));
    acc = acc + d * w[i];
    total += w[i];
  }
  if (total < 1e-9) return false;
  acc = acc * (1.0 / total);
  const double n = acc.norm();
  if (n < 1e-3) return false;
  *dir = acc * (1.0 / n);
  return true;
}

// One-directional trace; sign = +1 follows the field, -1 goes against it.
std::vector<Vec2> trace_one_way(const OrientationState& state, const Vec2& seed,
                                double sign, const TraceConfig& cfg) {
  std::vector<Vec2> pts{seed};
  Vec2 p = seed;
  bool have_prev = false;
  Vec2 prev_dir{0.0, 0.0};

  for (int step = 0; step < cfg.max_steps; ++step) {
    Vec2 d1;
    if (!sample_direction(state, p, &d1)) break;
    d1 = d1 * sign;

    Vec2 d2 = d1;
    Vec2 mid_dir;
    if (sample_direction(state, p + d1 * (0.5 * cfg.step), &mid_dir))
      d2 = mid_dir * sign;

    if (have_prev) {
      const double cosang = std::clamp(d2.dot(prev_dir), -1.0, 1.0);
      if (std::acos(cosang) > cfg.turn_limit) break;
    }

    const Vec2 next = p + d2 * cfg.step;
    if (!position_masked(state, next)) break;
    pts.push_back(next);
    prev_dir = d2;
    have_prev = true;
    p = next;
  }
  return pts;
}

}  // namespace

std::vector<Vec2> select_seeds(const DifferenceReport& report, const SeedPolicy& policy) {
  struct Candidate {
    float delta;
    int x, y;
  };
  std::vector<Candidate> cands;
  for (int y = 0; y < report.height; ++y)
    for (int x = 0; x < report.width; ++x) {
      if (!report.has_delta(x, y)) continue;
      const float d = report.delta_at(x, y);
      if (d >= policy.difference_threshold) cands.push_back({d, x, y});
    }

  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  std::vector<Vec2> seeds;
  for (const Candidate& c : cands) {
    if (static_cast<int>(seeds.size()) >= policy.max_seeds) break;
    bool ok = true;
    for (const Vec2& s : seeds) {
      const double dx = s.x - c.x;
      const double dy = s.y - c.y;
      if (std::sqrt(dx * dx + dy * dy) < policy.min_seed_separation) {
        ok = false;
        break;
      }
    }
    if (ok) seeds.push_back({static_cast<double>(c.x), static_cast<double>(c.y)});
  }
  return seeds;
}

Strand trace_strand(const OrientationState& state, const Vec2& seed,
                    const TraceConfig& config) {
  if (!position_masked(state, seed)) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "trace seed (%g, %g) is outside the mask",
                  seed.x, seed.y);
    throw InvalidSeedError(msg);
  }

  const std::vector<Vec2> down = trace_one_way(state, seed, +1.0, config);
  const std::vector<Vec2> up = trace_one_way(state, seed, -1.0, config);

  // Upstream end first, then the seed, then the downstream points.
  std::vector<Vec2> pts(up.rbegin(), up.rend());
  pts.insert(pts.end(), down.begin() + 1, down.end());
  if (pts.size() < 2) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "seed (%g, %g) cannot be traced", seed.x, seed.y);
    throw InvalidSeedError(msg);
  }

  Polyline2D path = Polyline2D::from_points(std::move(pts));
  const double d_front = state.scalp_line.distance_to(path.front());
  const double d_back = state.scalp_line.distance_to(path.back());
  if (d_back < d_front) path = path.reversed();
  return Strand::from_path(std::move(path));
}

std::vector<Strand> extract_strands(const OrientationState& state, int stride,
                                    const TraceConfig& config) {
  if (stride < 1) throw InvalidParameterError("extract_strands: stride must be >= 1");
  std::vector<Strand> strands;
  for (int y = 0; y < state.height; y += stride)
    for (int x = 0; x < state.width; x += stride) {
      if (!state.masked(x, y)) continue;
      try {
        strands.push_back(trace_strand(
            state, {static_cast<double>(x), static_cast<double>(y)}, config));
      } catch (const InvalidSeedError&) {
        // isolated or conflicted pixel; skip
      }
    }
  return strands;
}

std::string strands_to_json(const std::vector<Strand>& strands) {
  nlohmann::json doc;
  doc["strands"] = nlohmann::json::array();
  for (const Strand& s : strands) {
    nlohmann::json item;
    item["root"] = {s.root.x, s.root.y};
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec2& p : s.path.points()) pts.push_back({p.x, p.y});
    item["points"] = std::move(pts);
    doc["strands"].push_back(std::move(item));
  }
  return doc.dump(2);
}

void write_strands_json(const std::vector<Strand>& strands, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << strands_to_json(strands) << "\n";
}

std::vector<Strand> strands_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  std::vector<Strand> strands;
  for (const auto& item : doc.at("strands")) {
    std::vector<Vec2> pts;
    for (const auto& p : item.at("points"))
      pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    strands.push_back(Strand::from_path(Polyline2D::from_points(std::move(pts))));
  }
  return strands;
}

}  // namespace combplan
