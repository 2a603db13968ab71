#include <doctest.h>

#include "socnav/seeding.hpp"
#include "socnav/train.hpp"

using namespace socnav;

namespace {

TrainConfig tiny_config() {
  TrainConfig c = TrainConfig::for_stage(Stage::ego);
  c.budget = 120;
  c.warmup = 40;
  c.seed = 3;
  c.ddpg.batch_size = 8;
  c.ddpg.buffer_capacity = 500;
  c.episode_steps = 30;
  c.env.lidar.beams = 90;
  return c;
}

}  // namespace

TEST_SUITE("train") {

TEST_CASE("stage names round-trip") {
  CHECK(parse_stage("ego") == Stage::ego);
  CHECK(parse_stage(to_string(Stage::social)) == Stage::social);
  CHECK_THROWS_AS(parse_stage("expert"), std::invalid_argument);
}

TEST_CASE("zero budget returns the initialization unchanged") {
  TrainConfig c = tiny_config();
  c.budget = 0;
  const TrainResult a = train(c, std::nullopt);
  CHECK(a.steps == 0);
  CHECK(a.curve.empty());
  DdpgAgent fresh(c.network_spec(), c.ddpg, derive_seed(c.seed, "agent"));
  const Checkpoint init = fresh.to_checkpoint();
  for (const auto& t : init.tensors) {
    const NamedTensor* got = a.checkpoint.find(t.name);
    REQUIRE(got != nullptr);
    CHECK(got->values == t.values);
  }
  // A warm start passes through untouched as well.
  const TrainResult b = train(c, a.checkpoint);
  for (const auto& t : a.checkpoint.tensors) CHECK(b.checkpoint.find(t.name)->values == t.values);
}

TEST_CASE("social stage requires a warm start") {
  TrainConfig c = tiny_config();
  c.stage = Stage::social;
  CHECK_THROWS_AS(train(c, std::nullopt), std::invalid_argument);
  c.allow_cold_social = true;
  c.budget = 0;
  CHECK_NOTHROW(train(c, std::nullopt));
}

TEST_CASE("warm start with a different beam count is rejected") {
  TrainConfig c = tiny_config();
  c.budget = 0;
  const Checkpoint ck = train(c, std::nullopt).checkpoint;
  c.env.lidar.beams = 180;
  CHECK_THROWS_AS(train(c, ck), std::invalid_argument);
}

TEST_CASE("same seed and config give identical curves and weights") {
  const TrainConfig c = tiny_config();
  const TrainResult a = train(c, std::nullopt);
  const TrainResult b = train(c, std::nullopt);
  CHECK(a.steps == c.budget);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].dump() == b.curve[i].dump());
  for (const auto& t : a.checkpoint.tensors) CHECK(b.checkpoint.find(t.name)->values == t.values);
  CHECK(a.checkpoint.metadata.at("env_steps") == c.budget);
}

TEST_CASE("training environments follow the curriculum") {
  TrainConfig c = TrainConfig::for_stage(Stage::social);
  for (int i = 0; i < 50; ++i) {
    const EnvConfig e = sample_training_env(c, i);
    const double d = (e.goal - e.start).norm();
    CHECK(d >= c.curriculum.goal_distance_min - 1e-9);
    CHECK(d <= c.curriculum.goal_distance_max + 1e-9);
    CHECK(e.crowd.count >= c.curriculum.pedestrians_min);
    CHECK(e.crowd.count <= c.curriculum.pedestrians_max);
    CHECK(e.include_social_reward);
  }
  const EnvConfig a = sample_training_env(c, 7);
  const EnvConfig b = sample_training_env(c, 7);
  CHECK(a.map_seed == b.map_seed);
  CHECK(a.start == b.start);
}

TEST_CASE("train config JSON is strict and round-trips") {
  TrainConfig c = tiny_config();
  const auto j = c.to_json();
  CHECK(TrainConfig::from_json(j).to_json() == j);
  auto bad = j;
  bad["bugdet"] = 5;
  CHECK_THROWS_AS(TrainConfig::from_json(bad), std::invalid_argument);
  auto negative = j;
  negative["budget"] = -1;
  CHECK_THROWS_AS(TrainConfig::from_json(negative), std::invalid_argument);
}

TEST_CASE("trained checkpoint loads as a named policy") {
  TrainConfig c = tiny_config();
  c.budget = 0;
  const Checkpoint ck = train(c, std::nullopt).checkpoint;
  const auto policy = policy_from_checkpoint(ck, c.env.lidar, "ego");
  CHECK(policy->name() == "ego");
  LidarConfig other = c.env.lidar;
  other.beams = 45;
  CHECK_THROWS_AS(policy_from_checkpoint(ck, other, "ego"), std::invalid_argument);
}

}
