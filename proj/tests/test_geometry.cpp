#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "socnav/geometry.hpp"

using namespace socnav;

namespace {

Shape random_shape(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> size(0.1, 1.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
      return Circle({pos(rng), pos(rng)}, size(rng));
    case 1: {
      const Vec2 a{pos(rng), pos(rng)};
      return Segment(a, a + Vec2::from_angle(ang(rng)) * (1.0 + 2.0 * size(rng)));
    }
    default:
      return OrientedRect::centered({pos(rng), pos(rng)}, ang(rng), size(rng), size(rng));
  }
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("ray hits a circle at the tangency distance") {
  const std::vector<Shape> shapes{Circle({5, 0}, 1)};
  CHECK(ray_cast({0, 0}, {1, 0}, shapes, 10.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("ray with no shapes returns max range") {
  CHECK(ray_cast({0, 0}, {1, 0}, {}, 10.0) == 10.0);
}

TEST_CASE("oblique ray against a circle matches the frozen oracle value") {
  const std::vector<Shape> shapes{Circle({4, 1}, 0.5)};
  const Vec2 dir = Vec2::from_angle(0.3);
  const double got = ray_cast({0, 0}, dir, shapes, 10.0);
  CHECK(got == doctest::Approx(3.67123514381847).epsilon(1e-9));
  CHECK(std::abs(got - oracle::march_ray({0, 0}, dir, shapes, 10.0)) <= 1e-3);
}

TEST_CASE("ray_cast agrees with the marching oracle on random scenes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int scene = 0; scene < 200; ++scene) {
    std::vector<Shape> shapes;
    for (int k = 0; k < 4; ++k) shapes.push_back(random_shape(rng));
    const Vec2 dir = Vec2::from_angle(ang(rng));
    const double got = ray_cast({0, 0}, dir, shapes, 10.0);
    const double want = oracle::march_ray({0, 0}, dir, shapes, 10.0);
    INFO("scene " << scene);
    CHECK(std::abs(got - want) <= 1e-3);
  }
}

TEST_CASE("ray starting inside a solid reports zero") {
  const std::vector<Shape> shapes{Circle({0, 0}, 1)};
  CHECK(ray_cast({0.2, 0}, {1, 0}, shapes, 10.0) == 0.0);
}

TEST_CASE("rectangle intersection examples") {
  const auto a = OrientedRect::centered({0, 0}, 0.0, 0.5, 0.5);
  CHECK(rects_intersect(a, a));
  CHECK_FALSE(rects_intersect(a, OrientedRect::centered({10, 10}, 0.0, 0.5, 0.5)));
  const auto b = OrientedRect::centered({1.2, 0}, kPi / 4, 0.5, 0.5);
  CHECK(rects_intersect(a, b));
  std::mt19937_64 rng(3);
  CHECK(oracle::sampled_overlap(a, b, 1000000, rng));
}

TEST_CASE("touching rectangles count as intersecting") {
  const auto a = OrientedRect::centered({0, 0}, 0.0, 0.5, 0.5);
  const auto b = OrientedRect::centered({1.0, 0}, 0.0, 0.5, 0.5);
  CHECK(rects_intersect(a, b));
}

TEST_CASE("rectangle intersection agrees with the exact polygon oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> size(0.1, 1.2);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  int disagreements = 0;
  for (int scene = 0; scene < 2000; ++scene) {
    const OrientedRect a({pos(rng), pos(rng)}, ang(rng), size(rng), 2 * size(rng));
    const OrientedRect b({pos(rng), pos(rng)}, ang(rng), size(rng), 2 * size(rng));
    const auto pa = oracle::rect_corners(a);
    const auto pb = oracle::rect_corners(b);
    if (oracle::outline_gap(pa, pb) < 1e-9) continue;
    if (rects_intersect(a, b) != oracle::polygons_overlap(pa, pb)) ++disagreements;
    CHECK(rects_intersect(a, b) == rects_intersect(b, a));
  }
  CHECK(disagreements == 0);
}

TEST_CASE("closest distance examples") {
  const Circle robot({0, 0}, 0.3);
  const std::vector<Shape> far{Circle({2, 0}, 0.3)};
  CHECK(closest_distance(robot, far) == doctest::Approx(1.4).epsilon(1e-12));
  const std::vector<Shape> touching{Circle({0.6, 0}, 0.3)};
  CHECK(closest_distance(robot, touching) == doctest::Approx(0.0).scale(1.0));
  const std::vector<Shape> rect{OrientedRect::centered({2, 1}, 0.4, 0.5, 0.25)};
  const double got = closest_distance(robot, rect);
  CHECK(got == doctest::Approx(1.4315403303144205).epsilon(1e-9));
  CHECK(std::abs(got - oracle::sampled_surface_distance(robot, rect[0])) <= 1e-3);
}

TEST_CASE("closest distance rejects an empty shape list") {
  CHECK_THROWS_AS(closest_distance(Circle({0, 0}, 0.3), std::vector<Shape>{}),
                  std::invalid_argument);
}

TEST_CASE("surface distance agrees with dense boundary sampling") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  int compared = 0;
  for (int scene = 0; scene < 200; ++scene) {
    const Shape s = random_shape(rng);
    const Circle body({pos(rng), pos(rng)}, 0.3);
    if (oracle::inside(body.center(), s)) continue;
    ++compared;
    CHECK(std::abs(surface_distance(body, s) - oracle::sampled_surface_distance(body, s, 40000)) <=
          1e-3);
  }
  CHECK(compared > 100);
}

TEST_CASE("surface distance is monotone when the body moves straight away") {
  const Shape s = OrientedRect::centered({0, 0}, 0.7, 0.6, 0.3);
  double prev = -1e9;
  for (int k = 0; k < 50; ++k) {
    const double d = surface_distance(Circle({1.0 + 0.1 * k, 0.2}, 0.3), s);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("rigid motions preserve distances and ray hits") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int k = 0; k < 100; ++k) {
    const double theta = ang(rng);
    const Vec2 shift{ang(rng), ang(rng)};
    const auto move = [&](Vec2 p) { return p.rotated(theta) + shift; };
    const auto rect = OrientedRect::centered({1.5, 0.5}, 0.3, 0.4, 0.2);
    const auto moved = OrientedRect::centered(move(rect.center()), rect.heading() + theta, 0.4, 0.2);
    const Circle body({-0.5, 0.1}, 0.3);
    const Circle body_moved(move(body.center()), 0.3);
    CHECK(surface_distance(body, rect) ==
          doctest::Approx(surface_distance(body_moved, moved)).epsilon(1e-9));
    const std::vector<Shape> a{rect};
    const std::vector<Shape> b{moved};
    const Vec2 dir = Vec2::from_angle(0.2);
    CHECK(ray_cast({0, 0}, dir, a, 10.0) ==
          doctest::Approx(ray_cast(move({0, 0}), dir.rotated(theta), b, 10.0)).epsilon(1e-9));
  }
}

TEST_CASE("non-finite input is rejected") {
  CHECK_THROWS_AS(Circle({std::nan(""), 0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Circle({0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(Segment({1, 1}, {1, 1}), std::invalid_argument);
}

TEST_CASE("normalize_angle wraps into [-pi, pi]") {
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = normalize_angle(a);
    CHECK(w >= -kPi);
    CHECK(w <= kPi);
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)));
    CHECK(std::sin(w) == doctest::Approx(std::sin(a)));
  }
}

}
