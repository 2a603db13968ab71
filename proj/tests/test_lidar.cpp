#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "socnav/lidar.hpp"
#include "socnav/world.hpp"

using namespace socnav;

namespace {

LidarConfig small_lidar() {
  LidarConfig c;
  c.beams = 181;
  return c;
}

std::vector<Shape> closed_room() {
  std::vector<Shape> world = arena_walls(Arena{{0, 0}, {4, 4}});
  world.push_back(Circle({2, 1}, 0.5));
  world.push_back(OrientedRect::centered({-1.5, 2}, 0.6, 0.8, 0.3));
  world.push_back(Circle({0.5, -2.5}, 0.4));
  return world;
}

}  // namespace

TEST_SUITE("lidar") {

TEST_CASE("empty world reads max range everywhere") {
  const Scan s = simulate_scan({}, Pose{{0, 0}, 0.3}, small_lidar());
  for (double r : s.ranges) CHECK(r == 10.0);
}

TEST_CASE("wall straight ahead is seen by the center beam") {
  const std::vector<Shape> world{Segment({3, -5}, {3, 5})};
  const LidarConfig c = small_lidar();
  const Scan s = simulate_scan(world, Pose{{0, 0}, 0.0}, c);
  CHECK(s.ranges[90] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(c.beam_angle(0) == doctest::Approx(-0.75 * kPi));
}

TEST_CASE("every beam agrees with the marching oracle") {
  const LidarConfig c = small_lidar();
  const auto world = closed_room();
  const Pose pose{{0.3, -0.4}, 0.9};
  const Scan s = simulate_scan(world, pose, c);
  for (int i = 0; i < c.beams; ++i) {
    const Vec2 dir = Vec2::from_angle(pose.heading + c.beam_angle(i));
    CHECK(std::abs(s.ranges[i] - oracle::march_ray(pose.position, dir, world, c.range_max)) <=
          1e-3);
  }
}

TEST_CASE("readings are clamped to the sensor range") {
  LidarConfig c = small_lidar();
  c.noise_sigma = 0.5;
  std::mt19937_64 rng(1);
  const std::vector<Shape> world{Circle({0.3, 0}, 0.25)};
  const Scan s = simulate_scan(world, Pose{}, c, 0, &rng);
  for (double r : s.ranges) {
    CHECK(r >= c.range_min);
    CHECK(r <= c.range_max);
  }
}

TEST_CASE("noise is reproducible from the seed") {
  LidarConfig c = small_lidar();
  c.noise_sigma = 0.05;
  std::mt19937_64 a(9);
  std::mt19937_64 b(9);
  const auto world = closed_room();
  CHECK(simulate_scan(world, Pose{}, c, 0, &a).ranges ==
        simulate_scan(world, Pose{}, c, 0, &b).ranges);
}

TEST_CASE("calibration with no heading change is the identity") {
  const LidarConfig c = small_lidar();
  const Scan s = simulate_scan(closed_room(), Pose{{0, 0}, 0.2}, c);
  CHECK(calibrate(s, 0.2, c).ranges == s.ranges);
}

TEST_CASE("one increment of left turn shifts every beam down by one") {
  const LidarConfig c = small_lidar();
  const Scan s = simulate_scan(closed_room(), Pose{{0, 0}, 0.0}, c);
  CHECK(calibration_shift(0.0, c.increment(), c) == 1);
  const Scan out = calibrate(s, c.increment(), c);
  for (int i = 0; i + 1 < c.beams; ++i) CHECK(out.ranges[i] == s.ranges[i + 1]);
  CHECK(out.ranges[c.beams - 1] == c.range_max);
}

TEST_CASE("opposite shifts recover the original on untouched beams") {
  const LidarConfig c = small_lidar();
  const Scan s = simulate_scan(closed_room(), Pose{{0, 0}, 0.0}, c);
  const Scan mid = calibrate(s, -2 * c.increment(), c);
  const Scan back = calibrate(mid, 0.0, c);
  for (int i = 0; i < c.beams - 2; ++i) CHECK(back.ranges[i] == s.ranges[i]);
}

TEST_CASE("pure rotation gives identical motion-feature rows") {
  const LidarConfig c = small_lidar();
  const auto world = closed_room();
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> turn(-6, 6);
  ScanHistory history;
  double heading = 0.0;
  int k = 0;
  for (; k < kHistoryLength; ++k) {
    heading = normalize_angle(heading + turn(rng) * c.increment());
    history.push(simulate_scan(world, Pose{{0.2, 0.1}, heading}, c, k));
  }
  const auto scans = history.snapshot();
  const MotionFeature f = build_motion_feature(scans, heading, {}, c);
  REQUIRE(f.rows == kHistoryLength);
  // The closed room never yields max range, so 10.0 marks a filled beam.
  for (int r = 0; r < f.rows; ++r) {
    for (int i = 0; i < f.beams; ++i) {
      const double a = f.at(r, i);
      const double b = f.at(f.rows - 1, i);
      if (a == c.range_max || b == c.range_max) continue;
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
  }
  CHECK(f.row(f.rows - 1)[0] == scans.back().ranges[0]);
}

TEST_CASE("translation is not removed by calibration") {
  const LidarConfig c = small_lidar();
  const auto world = closed_room();
  ScanHistory history;
  for (int k = 0; k < kHistoryLength; ++k) {
    history.push(simulate_scan(world, Pose{{-1.0 + 0.05 * k, 0}, 0.0}, c, k));
  }
  const auto scans = history.snapshot();
  const MotionFeature f = build_motion_feature(scans, 0.0, {}, c);
  int differing = 0;
  for (int i = 0; i < f.beams; ++i) differing += f.at(0, i) != f.at(f.rows - 1, i);
  CHECK(differing > f.beams / 2);
}

TEST_CASE("a crossing pedestrian leaves a stripe that matches re-rendered frames") {
  const LidarConfig c = small_lidar();
  const std::vector<Shape> statics = arena_walls(Arena{{0, 0}, {4, 4}});
  const auto ped_at = [](int k) { return Vec2{2.0, -2.013 + 0.1 * k}; };
  ScanHistory history;
  for (int k = 0; k < kHistoryLength; ++k) {
    auto world = statics;
    world.push_back(Circle(ped_at(k), 0.3));
    history.push(simulate_scan(world, Pose{}, c, k));
  }
  const auto scans = history.snapshot();
  const MotionFeature f = build_motion_feature(scans, 0.0, {}, c);
  for (int r = 0; r < f.rows; ++r) {
    auto world = statics;
    world.push_back(Circle(ped_at(r), 0.3));
    for (int i = 0; i < c.beams; ++i) {
      const Vec2 dir = Vec2::from_angle(c.beam_angle(i));
      CHECK(std::abs(f.at(r, i) - oracle::march_ray({0, 0}, dir, world, c.range_max)) <= 1e-3);
    }
  }
  int changed = 0;
  for (int i = 0; i < f.beams; ++i) changed += f.at(0, i) != f.at(f.rows - 1, i);
  CHECK(changed > 0);
  CHECK(changed < f.beams / 4);
}

TEST_CASE("history seeds every slot with the first scan") {
  ScanHistory h;
  Scan s;
  s.ranges = {1, 2, 3};
  h.push(s);
  const auto snap = h.snapshot();
  CHECK(snap.size() == kHistoryLength);
  for (const auto& x : snap) CHECK(x.ranges == s.ranges);
}

TEST_CASE("relative goal bearing stays in [-pi, pi]") {
  const GoalVector g = relative_goal(Pose{{0, 0}, 3.0}, {-1, -0.1});
  CHECK(g.distance == doctest::Approx(std::hypot(1.0, 0.1)));
  CHECK(g.bearing >= -kPi);
  CHECK(g.bearing <= kPi);
  const GoalVector ahead = relative_goal(Pose{{1, 1}, kPi / 2}, {1, 3});
  CHECK(ahead.bearing == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("mismatched beam counts are rejected") {
  const LidarConfig c = small_lidar();
  Scan s;
  s.ranges.assign(10, 1.0);
  std::vector<Scan> h{s};
  CHECK_THROWS_AS(build_motion_feature(h, 0.0, {}, c), std::invalid_argument);
  CHECK_THROWS_AS(build_motion_feature(std::vector<Scan>{}, 0.0, {}, c), std::invalid_argument);
}

}
