#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "socnav/rewards.hpp"

using namespace socnav;

namespace {

Pedestrian ped_at(int id, Vec2 pos, Vec2 vel, double radius = 0.3) {
  Pedestrian p;
  p.id = id;
  p.position = pos;
  p.velocity = vel;
  p.radius = radius;
  p.motion_heading = vel.norm() > 0 ? vel.angle() : 0.0;
  return p;
}

}  // namespace

TEST_SUITE("rewards") {

TEST_CASE("ego term examples") {
  CHECK(ego_reward_from_distance(0.0, 0.3).reward == -10.0);
  CHECK(ego_reward_from_distance(-0.1, 0.3).collision);
  CHECK(ego_reward_from_distance(0.7, 0.3).reward == 0.0);
  CHECK_FALSE(ego_reward_from_distance(0.7, 0.3).violation);
  CHECK(ego_reward_from_distance(0.35, 0.3).reward == doctest::Approx(-0.125).epsilon(1e-12));
  CHECK(ego_reward_from_distance(std::numeric_limits<double>::infinity(), 0.3).reward == 0.0);
}

TEST_CASE("ego term from shapes uses the closest surface") {
  const std::vector<Shape> bodies{Circle({1.0, 0}, 0.3), Circle({5, 5}, 1)};
  const EgoResult r = ego_reward(Circle({0, 0}, 0.3), bodies);
  CHECK(r.closest == doctest::Approx(0.4));
  CHECK(r.reward == doctest::Approx(-0.25 * (1 - 0.4 / 0.7)));
  CHECK(ego_reward(Circle({0, 0}, 0.3), {}).reward == 0.0);
}

TEST_CASE("social zone length examples") {
  const auto z = social_zone({0, 0}, 0.0, 0.3, 1.0, 0.77, 0.5);
  CHECK(z.length() == doctest::Approx(1.42).epsilon(1e-12));
  CHECK(z.half_width() == 0.3);
  CHECK(social_zone({0, 0}, 0.0, 0.3, 0.0, 0.77, 0.5).length() == doctest::Approx(0.65));
  CHECK_THROWS_AS(social_zone({0, 0}, 0.0, 0.3, -1.0, 0.77, 0.5), std::invalid_argument);
}

TEST_CASE("social term examples") {
  const auto zone = social_zone({0, 0}, 0.0, 0.3, 1.0, 0.77, 0.5);
  CHECK(social_reward(zone, {0, 0}, {}).reward == 0.0);

  // Two pedestrians walk into the robot's zone, six are far to the side.
  std::vector<Pedestrian> peds{ped_at(0, {1.5, 0}, {-1, 0}), ped_at(1, {1.0, 0.5}, {0, -1})};
  for (int k = 0; k < 6; ++k) peds.push_back(ped_at(2 + k, {-2.0 - k, 3.0}, {0, 1}));
  const SocialResult r = social_reward(zone, {0, 0}, peds);
  CHECK(r.violations == 2);
  CHECK(r.reward == doctest::Approx(-0.025).epsilon(1e-12));

  const auto far_zone = social_zone({20, 20}, 0.0, 0.3, 0.0, 0.77, 0.5);
  CHECK(social_reward(far_zone, {20, 20}, peds).violations == 0);
  CHECK(social_reward(far_zone, {20, 20}, peds).considered == 0);
}

TEST_CASE("stationary pedestrian keeps its last motion heading") {
  Pedestrian p = ped_at(0, {0, 0}, {0, 0});
  p.motion_heading = 1.0;
  CHECK(pedestrian_zone(p).heading() == doctest::Approx(1.0));
}

TEST_CASE("violation count matches the brute-force polygon oracle") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> vel(-1.5, 1.5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  const RewardParams params;
  for (int scene = 0; scene < 100; ++scene) {
    std::vector<Pedestrian> peds;
    for (int k = 0; k < 10; ++k) peds.push_back(ped_at(k, {pos(rng), pos(rng)}, {vel(rng), vel(rng)}));
    const Vec2 robot{pos(rng), pos(rng)};
    const auto zone = social_zone(robot, ang(rng), 0.3, std::abs(vel(rng)), 0.77, 0.5);
    CHECK(social_reward(zone, robot, peds, params).violations ==
          oracle::brute_force_violations(zone, robot, peds, params));
  }
}

TEST_CASE("goal term examples") {
  const Vec2 start{0, 0};
  const Vec2 goal{4, 0};
  CHECK(goal_reward(goal, goal, start, true) == 10.0);
  CHECK(goal_reward(start, goal, start, false) == doctest::Approx(-0.01).epsilon(1e-12));
  CHECK(goal_reward({2, 0}, goal, start, false) == doctest::Approx(-0.005).epsilon(1e-12));
  CHECK(goal_reward({-4, 0}, goal, start, false) == doctest::Approx(-0.01).epsilon(1e-12));
  CHECK_THROWS_AS(goal_reward(start, start, start, false), std::invalid_argument);
}

TEST_CASE("randomized states respect the term ranges") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> vel(-1.5, 1.5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::bernoulli_distribution coin(0.05);
  for (int k = 0; k < 2000; ++k) {
    std::vector<Pedestrian> peds;
    const int n = std::uniform_int_distribution<int>(0, 10)(rng);
    for (int i = 0; i < n; ++i) peds.push_back(ped_at(i, {pos(rng), pos(rng)}, {vel(rng), vel(rng)}));
    std::vector<Shape> obstacles{Circle({pos(rng), pos(rng)}, 0.5)};
    const RobotSnapshot robot{Circle({pos(rng), pos(rng)}, 0.3), ang(rng), std::abs(vel(rng))};
    const SafetyAssessment a =
        assess(robot, peds, obstacles, {pos(rng), pos(rng) + 20}, {0, 0}, coin(rng), true);
    CHECK((a.ego == -10.0 || (a.ego >= -0.25 && a.ego <= 0.0)));
    CHECK(a.social >= -0.1);
    CHECK(a.social <= 0.0);
    CHECK((a.goal == 10.0 || (a.goal >= -0.01 && a.goal <= 0.0)));
    CHECK(a.total() == a.ego + a.social + a.goal);
  }
}

TEST_CASE("collision never pays the arrival bonus") {
  const std::vector<Shape> obstacles{Circle({0.2, 0}, 0.3)};
  const RobotSnapshot robot{Circle({0, 0}, 0.3), 0.0, 0.0};
  const auto a = assess(robot, {}, obstacles, {0.1, 0}, {-3, 0}, true, true);
  CHECK(a.collision);
  CHECK(a.goal <= 0.0);
}

TEST_CASE("social term can be disabled while counts are kept") {
  std::vector<Pedestrian> peds{ped_at(0, {1.0, 0}, {-1, 0})};
  const RobotSnapshot robot{Circle({0, 0}, 0.3), 0.0, 1.0};
  const auto off = assess(robot, peds, {}, {5, 0}, {-3, 0}, false, false);
  const auto on = assess(robot, peds, {}, {5, 0}, {-3, 0}, false, true);
  CHECK(off.social == 0.0);
  CHECK(off.violations == 1);
  CHECK(on.social == doctest::Approx(-0.1));
}

}
