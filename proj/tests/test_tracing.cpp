#include <doctest.h>

#include <cmath>

#include "combplan/random.hpp"
#include "combplan/tracing.hpp"
#include "oracles.hpp"

using namespace combplan;

namespace {

// Band of masked pixels with a constant orientation; scalp along the top row.
OrientationState band_state(int w, int h, double angle) {
  OrientationState s;
  s.width = w;
  s.height = h;
  s.orientation.assign(static_cast<size_t>(w) * h,
                       std::numeric_limits<float>::quiet_NaN());
  s.mask.assign(static_cast<size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      s.mask[i] = 1;
      s.orientation[i] = static_cast<float>(angle);
    }
  s.scalp_line = Polyline2D::from_points({{0.0, 0.0}, {w - 1.0, 0.0}});
  return s;
}

DifferenceReport report_from(const std::vector<std::vector<double>>& grid) {
  DifferenceReport r;
  r.height = static_cast<int>(grid.size());
  r.width = static_cast<int>(grid[0].size());
  r.delta.assign(static_cast<size_t>(r.width) * r.height,
                 std::numeric_limits<float>::quiet_NaN());
  r.absent_target.assign(r.delta.size(), 0);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      if (grid[y][x] >= 0.0)
        r.delta[static_cast<size_t>(y) * r.width + x] = static_cast<float>(grid[y][x]);
  return r;
}

}  // namespace

TEST_CASE("select_seeds trivial cases") {
  const DifferenceReport zero = report_from({{0, 0, 0}, {0, 0, 0}});
  CHECK(select_seeds(zero, SeedPolicy{}).empty());

  DifferenceReport one = report_from({{0, 0, 0}, {0, 0.9, 0}});
  const auto seeds = select_seeds(one, SeedPolicy{0.35, 8, 12.0});
  REQUIRE(seeds.size() == 1);
  CHECK(seeds[0].x == 1);
  CHECK(seeds[0].y == 1);
}

TEST_CASE("select_seeds clustered maxima yield one seed") {
  // Three peaks within the separation radius: only the max survives.
  DifferenceReport r = report_from({{0, 0, 0, 0, 0},
                                    {0, 0.8, 0.9, 0.7, 0},
                                    {0, 0, 0, 0, 0}});
  const auto seeds = select_seeds(r, SeedPolicy{0.35, 8, 4.0});
  REQUIRE(seeds.size() == 1);
  CHECK(seeds[0].x == 2);
  CHECK(seeds[0].y == 1);
}

TEST_CASE("select_seeds matches the greedy oracle on random grids") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 12, h = 10;
    std::vector<std::vector<double>> grid(h, std::vector<double>(w, -1.0));
    std::vector<oracles::SeedOracleCell> cells;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (rng.uniform() < 0.7) {
          grid[y][x] = rng.uniform(0.0, kPi);
          cells.push_back({grid[y][x], x, y});
        }
    SeedPolicy policy{0.3, 5, 3.0};
    const auto got = select_seeds(report_from(grid), policy);
    const auto expect = oracles::greedy_seeds(cells, policy.difference_threshold,
                                              policy.max_seeds,
                                              policy.min_seed_separation);
    REQUIRE(got.size() == expect.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(static_cast<int>(got[i].x) == expect[i].first);
      CHECK(static_cast<int>(got[i].y) == expect[i].second);
    }
  }
}

TEST_CASE("trace on a uniform downward field is straight and rooted at top") {
  const OrientationState s = band_state(40, 60, 1.5 * kPi);
  const Strand strand = trace_strand(s, {20, 30}, TraceConfig{});

  // Root is the end nearer the scalp (top row).
  CHECK(strand.root.y < strand.end().y);
  CHECK(s.scalp_line.distance_to(strand.root) <=
        s.scalp_line.distance_to(strand.end()));

  for (const Vec2& p : strand.path.points()) {
    CHECK(std::fabs(p.x - 20.0) <= 0.5);  // cross-track deviation
    const int px = static_cast<int>(std::lround(p.x));
    const int py = static_cast<int>(std::lround(p.y));
    CHECK(s.masked(px, py));
  }
  // Direction along the strand equals the field angle.
  const Vec2 d = strand.end() - strand.root;
  CHECK(angle_difference(angle_of(d), 1.5 * kPi) < 1e-3);
  // Spans the band both ways from the seed.
  CHECK(strand.arc_length > 50.0);
}

TEST_CASE("trace on tilted constant fields stays straight") {
  for (double angle : {1.3 * kPi, 1.65 * kPi}) {
    const OrientationState s = band_state(80, 80, angle);
    const Strand strand = trace_strand(s, {40, 40}, TraceConfig{});
    const Vec2 dir = direction_of(angle);
    for (const Vec2& p : strand.path.points()) {
      // Cross-track deviation from the line through the seed.
      const Vec2 rel = p - Vec2{40, 40};
      CHECK(std::fabs(rel.cross(dir)) <= 0.5);
    }
    CHECK(angle_difference(angle_of(strand.end() - strand.root), angle) < 1e-3);
  }
}

TEST_CASE("trace extends upstream from a downstream-edge seed") {
  const OrientationState s = band_state(30, 50, 1.5 * kPi);
  const Strand strand = trace_strand(s, {15, 48}, TraceConfig{});
  CHECK(strand.root.y < 2.0);
  CHECK(strand.end().y > 46.0);
}

TEST_CASE("trace terminates on a vortex field") {
  const int wh = 64;
  OrientationState s = band_state(wh, wh, 0.0);
  for (int y = 0; y < wh; ++y)
    for (int x = 0; x < wh; ++x) {
      // Tangential field around the center.
      const double dx = x - wh / 2.0;
      const double dy = y - wh / 2.0;
      const Vec2 tangent{-(-dy), -dx};  // perpendicular to the radius, y-down
      s.orientation[static_cast<size_t>(y) * wh + x] =
          static_cast<float>(angle_of(tangent));
    }
  TraceConfig cfg;
  cfg.max_steps = 150;
  const Strand strand = trace_strand(s, {wh / 2.0 + 12.0, wh / 2.0}, cfg);
  CHECK(strand.path.size() <= static_cast<size_t>(2 * cfg.max_steps + 1));
  CHECK(strand.path.size() >= 2);
}

TEST_CASE("trace rejects unmasked seeds") {
  OrientationState s = band_state(20, 20, 0.0);
  s.mask[5 * 20 + 5] = 0;
  CHECK_THROWS_AS(trace_strand(s, {5, 5}, TraceConfig{}), InvalidSeedError);
  CHECK_THROWS_AS(trace_strand(s, {-3, 5}, TraceConfig{}), InvalidSeedError);
}

TEST_CASE("tracing is deterministic") {
  const OrientationState s = band_state(40, 40, 1.4 * kPi);
  const Strand a = trace_strand(s, {17, 23}, TraceConfig{});
  const Strand b = trace_strand(s, {17, 23}, TraceConfig{});
  REQUIRE(a.path.size() == b.path.size());
  for (size_t i = 0; i < a.path.size(); ++i) {
    CHECK(a.path.points()[i].x == b.path.points()[i].x);
    CHECK(a.path.points()[i].y == b.path.points()[i].y);
  }
}

TEST_CASE("extract_strands finds strands on a grid") {
  const OrientationState s = band_state(40, 30, 1.5 * kPi);
  const auto strands = extract_strands(s, 8, TraceConfig{});
  CHECK(strands.size() >= 15);
  for (const Strand& st : strands) {
    CHECK(st.root.y <= st.end().y);
    CHECK(st.arc_length > 10.0);
  }
}

TEST_CASE("strand JSON round trip") {
  std::vector<Strand> strands;
  strands.push_back(Strand::from_path(
      Polyline2D::from_points({{1.5, 2.25}, {3.0, 4.0}, {5.5, 8.75}})));
  strands.push_back(Strand::from_path(Polyline2D::from_points({{0, 0}, {7, 1}})));

  const std::string text = strands_to_json(strands);
  const auto back = strands_from_json(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].root.x == doctest::Approx(1.5));
  CHECK(back[0].path.size() == 3);
  CHECK(back[0].path.points()[2].y == doctest::Approx(8.75));
  CHECK(back[1].arc_length == doctest::Approx(strands[1].arc_length));
}
