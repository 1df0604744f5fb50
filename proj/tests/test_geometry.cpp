#include <doctest.h>

#include <cmath>

#include "combplan/geometry.hpp"
#include "combplan/random.hpp"
#include "oracles.hpp"

using namespace combplan;

namespace {
double deg(double d) { return d * kPi / 180.0; }
}

TEST_CASE("angle_difference matches the subtract-pi rule") {
  CHECK(angle_difference(0.0, 0.0) == doctest::Approx(0.0));
  // |340 deg| > 180 deg -> 160 deg
  CHECK(angle_difference(deg(350), deg(10)) == doctest::Approx(deg(160)).epsilon(1e-12));
  CHECK(angle_difference(deg(90), deg(100)) == doctest::Approx(deg(10)).epsilon(1e-12));
  // exactly pi stays pi (strictly-greater branch)
  CHECK(angle_difference(0.0, kPi) == doctest::Approx(kPi));
}

TEST_CASE("angle_difference properties") {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(0.0, kTwoPi);
    const double b = rng.uniform(0.0, kTwoPi);
    const double d = angle_difference(a, b);
    CHECK(d == angle_difference(b, a));
    CHECK(d >= 0.0);
    CHECK(d <= kPi);
    CHECK(angle_difference(a, a) == 0.0);
    if (a != b) CHECK(angle_difference(a, b) > 0.0);
  }
}

TEST_CASE("normalize_angle lands in [0, 2pi)") {
  CHECK(normalize_angle(kTwoPi) == 0.0);
  CHECK(normalize_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(normalize_angle(7.0 * kPi) == doctest::Approx(kPi));
}

TEST_CASE("direction/angle round trip uses y-down pixels") {
  // 270 degrees points down the image (+y).
  const Vec2 down = direction_of(deg(270));
  CHECK(down.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(down.y == doctest::Approx(1.0));
  CHECK(angle_of({0.0, 1.0}) == doctest::Approx(deg(270)));
  CHECK(angle_of({1.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("polyline basics") {
  auto line = Polyline2D::from_points({{0, 0}, {0, 0}, {3, 4}});
  CHECK(line.size() == 2);  // duplicate dropped
  CHECK(line.arc_length() == doctest::Approx(5.0));
  CHECK_THROWS_AS(Polyline2D::from_points({{1, 1}, {1, 1}}), InvalidParameterError);

  auto path = Polyline2D::from_points({{0, 0}, {10, 0}, {10, 10}});
  const Vec2 mid = path.point_at_arc(10.0);
  CHECK(mid.x == doctest::Approx(10.0));
  CHECK(mid.y == doctest::Approx(0.0));
  CHECK(path.distance_to({5, 3}) == doctest::Approx(3.0));
  CHECK(path.nearest_arc({5, 3}) == doctest::Approx(5.0));

  const Vec2 beyond = path.point_at_arc_extended(25.0);
  CHECK(beyond.x == doctest::Approx(10.0));
  CHECK(beyond.y == doctest::Approx(15.0));

  auto rs = path.resampled(5);
  CHECK(rs.size() == 5);
  CHECK(rs.points().front().x == doctest::Approx(0.0));
  CHECK(rs.points().back().y == doctest::Approx(10.0));
}

TEST_CASE("fit_bezier straight two-point input") {
  auto raw = Polyline2D::from_points({{0, 0}, {10, 0}});
  auto out = fit_bezier(raw, 5);
  CHECK(out.size() == 5);
  for (const Vec2& p : out.points()) CHECK(std::fabs(p.y) < 1e-9);
  CHECK(out.front().x == doctest::Approx(0.0));
  CHECK(out.back().x == doctest::Approx(10.0));
}

TEST_CASE("fit_bezier endpoints always interpolate") {
  Rng rng(23);
  for (int k = 0; k < 50; ++k) {
    std::vector<Vec2> pts;
    const int n = 3 + static_cast<int>(rng.uniform_index(10));
    Vec2 p{rng.uniform(0, 100), rng.uniform(0, 100)};
    for (int i = 0; i < n; ++i) {
      pts.push_back(p);
      p = p + Vec2{rng.uniform(1, 10), rng.uniform(-5, 5)};
    }
    auto out = fit_bezier(Polyline2D::from_points(pts), 16);
    CHECK((out.front() - pts.front()).norm() < 1e-6);
    CHECK((out.back() - pts.back()).norm() < 1e-6);
  }
}

TEST_CASE("fit_bezier matches the normal-equations oracle on a noisy arc") {
  // Quarter arc of radius 50 px with deterministic pseudo-noise.
  Rng rng(31);
  std::vector<Vec2> raw;
  const int n = 40;
  for (int i = 0; i < n; ++i) {
    const double t = (kPi / 2.0) * i / (n - 1);
    raw.push_back({50.0 * std::cos(t) + rng.uniform(-0.3, 0.3),
                   50.0 * std::sin(t) + rng.uniform(-0.3, 0.3)});
  }

  const auto fit = fit_bezier(Polyline2D::from_points(raw), 64);
  const auto oracle = oracles::bezier_fit(raw);
  for (int i = 0; i < 64; ++i) {
    const double t = static_cast<double>(i) / 63.0;
    const Vec2 expect = oracle.eval(t);
    CHECK((fit.points()[i] - expect).norm() < 1e-6);
  }
}

TEST_CASE("fit_bezier collinear input degrades to the chord") {
  auto raw = Polyline2D::from_points({{0, 0}, {2, 2}, {5, 5}, {9, 9}});
  auto out = fit_bezier(raw, 9);
  for (const Vec2& p : out.points()) CHECK(std::fabs(p.x - p.y) < 1e-6);
  CHECK((out.back() - Vec2{9, 9}).norm() < 1e-9);
}

TEST_CASE("build_frame examples") {
  const Frame3D f1 = build_frame({0, 0, 0}, {0, 1, 0}, {0, 0, 1});
  CHECK((f1.x - Vec3{1, 0, 0}).norm() < 1e-12);
  CHECK((f1.y - Vec3{0, 1, 0}).norm() < 1e-12);
  CHECK((f1.z - Vec3{0, 0, 1}).norm() < 1e-12);

  // Projection removes the normal component of the tangent.
  const Frame3D f2 = build_frame({0, 0, 0}, {0, 1, 1}, {0, 0, 1});
  CHECK((f2.y - Vec3{0, 1, 0}).norm() < 1e-12);
  CHECK((f2.z - Vec3{0, 0, 1}).norm() < 1e-12);
  CHECK((f2.x - Vec3{1, 0, 0}).norm() < 1e-12);

  CHECK_THROWS_AS(build_frame({0, 0, 0}, {0, 0, 1}, {0, 0, 1}), DegenerateFrameError);
  CHECK_THROWS_AS(build_frame({0, 0, 0}, {0, 0, 0}, {0, 0, 1}), DegenerateFrameError);
}

TEST_CASE("build_frame randomized orthonormality") {
  Rng rng(41);
  int built = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Vec3 n{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (t.norm() < 1e-3 || n.norm() < 1e-3) continue;
    if (t.cross(n).norm() / (t.norm() * n.norm()) < 1e-5) continue;  // near parallel
    const Frame3D f = build_frame({0, 0, 0}, t, n);
    CHECK(f.orthonormality_error() <= 1e-9);
    ++built;
  }
  CHECK(built > 9900);
}

TEST_CASE("signed_angle_delta picks the short way") {
  CHECK(signed_angle_delta(0.1, 0.3) == doctest::Approx(0.2));
  CHECK(signed_angle_delta(0.3, 0.1) == doctest::Approx(-0.2));
  CHECK(signed_angle_delta(0.1, kTwoPi - 0.1) == doctest::Approx(-0.2));
}
