#include "socnav/train.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "socnav/config.hpp"
#include "socnav/seeding.hpp"

namespace socnav {

std::string_view to_string(Stage stage) { return stage == Stage::ego ? "ego" : "social"; }

Stage parse_stage(std::string_view name) {
  if (name == "ego") return Stage::ego;
  if (name == "social") return Stage::social;
  throw std::invalid_argument("unknown stage '" + std::string(name) + "'; expected ego or social");
}

Curriculum Curriculum::ego() {
  Curriculum c;
  c.obstacles_min = 3;
  c.obstacles_max = 10;
  c.pedestrians_min = 0;
  c.pedestrians_max = 2;
  return c;
}

Curriculum Curriculum::social() {
  Curriculum c;
  c.obstacles_min = 0;
  c.obstacles_max = 3;
  c.pedestrians_min = 4;
  c.pedestrians_max = 10;
  c.scenarios = true;
  return c;
}

TrainConfig TrainConfig::for_stage(Stage stage) {
  TrainConfig c;
  c.stage = stage;
  c.curriculum = stage == Stage::ego ? Curriculum::ego() : Curriculum::social();
  c.env.lidar.beams = 180;
  c.env.include_social_reward = stage == Stage::social;
  c.ddpg.buffer_capacity = 100000;
  return c;
}

NetworkSpec TrainConfig::network_spec() const {
  if (network == "desk") return NetworkSpec::desk(env.lidar.beams);
  if (network == "standard") return NetworkSpec::standard(env.lidar.beams);
  throw std::invalid_argument("unknown network preset '" + network + "'; expected desk or standard");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"stage", to_string(stage)},
          {"budget", budget},
          {"seed", seed},
          {"network", network},
          {"ddpg", ddpg.to_json()},
          {"curriculum",
           {{"obstacles", {curriculum.obstacles_min, curriculum.obstacles_max}},
            {"pedestrians", {curriculum.pedestrians_min, curriculum.pedestrians_max}},
            {"scenarios", curriculum.scenarios},
            {"goal_distance", {curriculum.goal_distance_min, curriculum.goal_distance_max}}}},
          {"env", socnav::to_json(env)},
          {"sigma_start", sigma_start},
          {"sigma_end", sigma_end},
          {"warmup", warmup},
          {"update_every", update_every},
          {"updates_per_step", updates_per_step},
          {"checkpoint_every", checkpoint_every},
          {"episode_steps", episode_steps},
          {"success_window", success_window},
          {"divergence_threshold", divergence_threshold},
          {"allow_cold_social", allow_cold_social}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  require_known_keys(j,
                     {"stage", "budget", "seed", "network", "ddpg", "curriculum", "env",
                      "sigma_start", "sigma_end", "warmup", "update_every", "updates_per_step",
                      "checkpoint_every", "episode_steps", "success_window",
                      "divergence_threshold", "allow_cold_social"},
                     "training config");
  TrainConfig c = for_stage(parse_stage(j.value("stage", std::string("ego"))));
  try {
    c.budget = j.value("budget", c.budget);
    c.seed = j.value("seed", c.seed);
    c.network = j.value("network", c.network);
    if (j.contains("ddpg")) {
      nlohmann::json merged = c.ddpg.to_json();
      merged.update(j.at("ddpg"));
      c.ddpg = DdpgConfig::from_json(merged);
    }
    if (auto it = j.find("curriculum"); it != j.end()) {
      require_known_keys(*it, {"obstacles", "pedestrians", "scenarios", "goal_distance"},
                         "curriculum");
      if (it->contains("obstacles")) {
        c.curriculum.obstacles_min = it->at("obstacles").at(0);
        c.curriculum.obstacles_max = it->at("obstacles").at(1);
      }
      if (it->contains("pedestrians")) {
        c.curriculum.pedestrians_min = it->at("pedestrians").at(0);
        c.curriculum.pedestrians_max = it->at("pedestrians").at(1);
      }
      c.curriculum.scenarios = it->value("scenarios", c.curriculum.scenarios);
      if (it->contains("goal_distance")) {
        c.curriculum.goal_distance_min = it->at("goal_distance").at(0);
        c.curriculum.goal_distance_max = it->at("goal_distance").at(1);
      }
    }
    if (j.contains("env")) c.env = env_config_from_json(j.at("env"), c.env);
    c.sigma_start = j.value("sigma_start", c.sigma_start);
    c.sigma_end = j.value("sigma_end", c.sigma_end);
    c.warmup = j.value("warmup", c.warmup);
    c.update_every = j.value("update_every", c.update_every);
    c.updates_per_step = j.value("updates_per_step", c.updates_per_step);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.episode_steps = j.value("episode_steps", c.episode_steps);
    c.success_window = j.value("success_window", c.success_window);
    c.divergence_threshold = j.value("divergence_threshold", c.divergence_threshold);
    c.allow_cold_social = j.value("allow_cold_social", c.allow_cold_social);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad training config: ") + e.what());
  }
  if (c.budget < 0 || c.update_every < 1 || c.updates_per_step < 0 || c.episode_steps < 1 ||
      c.warmup < 0 || c.curriculum.obstacles_min > c.curriculum.obstacles_max ||
      c.curriculum.pedestrians_min > c.curriculum.pedestrians_max) {
    throw std::invalid_argument("training config has an out-of-range value");
  }
  return c;
}

EnvConfig sample_training_env(const TrainConfig& config, long long index) {
  std::mt19937_64 rng(derive_seed(config.seed, "train-episode", static_cast<std::uint64_t>(index)));
  const Curriculum& cur = config.curriculum;
  EnvConfig env = config.env;
  const Arena& arena = env.map.arena;
  const double inset = 1.0;
  std::uniform_real_distribution<double> ux(arena.center.x - arena.half_extent.x + inset,
                                            arena.center.x + arena.half_extent.x - inset);
  std::uniform_real_distribution<double> uy(arena.center.y - arena.half_extent.y + inset,
                                            arena.center.y + arena.half_extent.y - inset);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> dist(cur.goal_distance_min, cur.goal_distance_max);
  const auto inside = [&](Vec2 p) {
    return std::abs(p.x - arena.center.x) <= arena.half_extent.x - inset &&
           std::abs(p.y - arena.center.y) <= arena.half_extent.y - inset;
  };
  env.start = {ux(rng), uy(rng)};
  env.goal = env.start + Vec2::from_angle(angle(rng)) * dist(rng);
  for (int attempt = 0; attempt < 100 && !inside(env.goal); ++attempt) {
    env.start = {ux(rng), uy(rng)};
    env.goal = env.start + Vec2::from_angle(angle(rng)) * dist(rng);
  }
  if (!inside(env.goal)) env.goal = arena.center;
  env.start_heading = angle(rng);
  env.map.count_min = env.map.count_max =
      std::uniform_int_distribution<int>(cur.obstacles_min, cur.obstacles_max)(rng);
  env.map_seed = rng();
  env.crowd.seed = rng();
  env.crowd.count = std::uniform_int_distribution<int>(cur.pedestrians_min, cur.pedestrians_max)(rng);
  env.crowd.area.center = (env.start + env.goal) * 0.5;
  if (cur.scenarios) {
    constexpr ScenarioKind kinds[] = {ScenarioKind::crossing, ScenarioKind::towards,
                                      ScenarioKind::ahead, ScenarioKind::random};
    env.scenario = kinds[std::uniform_int_distribution<int>(0, 3)(rng)];
    env.crowd.walk_in_probability = 0.005;
    env.crowd.stop_go_probability = 0.002;
  } else {
    env.scenario.reset();
  }
  env.max_steps = config.episode_steps;
  env.include_social_reward = config.stage == Stage::social;
  return env;
}

namespace {

nlohmann::json checkpoint_metadata(const TrainConfig& config, const NetworkSpec& spec,
                                   long long steps) {
  return {{"stage", to_string(config.stage)},
          {"config_hash", config_hash(spec, config.env.lidar)},
          {"lidar", to_json(config.env.lidar)},
          {"env_steps", steps},
          {"train", config.to_json()}};
}

}  // namespace

TrainResult train(const TrainConfig& config, const std::optional<Checkpoint>& warm_start,
                  const TrainHooks& hooks) {
  if (config.stage == Stage::social && !warm_start && !config.allow_cold_social) {
    throw std::invalid_argument(
        "social stage needs an ego checkpoint as warm start (or allow_cold_social)");
  }
  config.env.validate();
  NetworkSpec spec = config.network_spec();
  if (warm_start) spec = NetworkSpec::from_json(warm_start->metadata.at("network"));
  if (spec.beams != config.env.lidar.beams) {
    throw std::invalid_argument("checkpoint expects " + std::to_string(spec.beams) +
                                " beams, environment has " +
                                std::to_string(config.env.lidar.beams));
  }
  DdpgAgent agent(spec, config.ddpg, derive_seed(config.seed, "agent"));
  if (warm_start) agent.load(*warm_start);

  TrainResult result;
  if (config.budget == 0) {
    result.checkpoint = agent.to_checkpoint(checkpoint_metadata(config, spec, 0));
    return result;
  }

  ReplayBuffer buffer(config.ddpg.buffer_capacity, config.env.lidar, spec,
                      config.env.rates.ticks_per_policy());
  std::mt19937_64 noise_rng(derive_seed(config.seed, "exploration"));
  std::mt19937_64 sample_rng(derive_seed(config.seed, "replay"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::deque<int> recent;
  UpdateStats last_stats;
  bool have_stats = false;

  long long steps = 0;
  long long env_index = 0;
  while (steps < config.budget) {
    std::optional<Environment> env;
    MotionFeature feature;
    while (!env) {
      try {
        env.emplace(sample_training_env(config, env_index++));
        feature = env->reset();
      } catch (const std::runtime_error&) {
        env.reset();  // over-dense map; draw the next episode instead
      }
    }
    const double reference = (env->config().goal - env->config().start).norm();
    buffer.begin_episode(env->step_scans().front(), feature.goal, reference);
    double episode_return = 0.0;

    while (env->outcome() == Outcome::running && steps < config.budget) {
      const double progress = static_cast<double>(steps) / static_cast<double>(config.budget);
      const double sigma = config.sigma_start + (config.sigma_end - config.sigma_start) * progress;
      Action a = agent.act(feature);
      a = Action{a.ax + sigma * gauss(noise_rng), a.ay + sigma * gauss(noise_rng)}.clamped();

      StepOutcome out = env->step(a);
      ++steps;
      episode_return += out.reward;
      const bool terminal = out.done == Outcome::collided || out.done == Outcome::reached;
      buffer.record(a, out.reward, terminal, env->step_scans(), out.observation.goal);
      feature = std::move(out.observation);

      if (steps >= config.warmup && steps % config.update_every == 0 &&
          buffer.size() >= static_cast<std::size_t>(config.ddpg.batch_size)) {
        for (int u = 0; u < config.updates_per_step; ++u) {
          last_stats = agent.update(buffer.sample(config.ddpg.batch_size, sample_rng));
          have_stats = true;
          if (!std::isfinite(last_stats.critic_loss) ||
              last_stats.critic_loss > config.divergence_threshold) {
            nlohmann::json diag = {{"step", steps},
                                   {"episode", result.episodes},
                                   {"critic_loss", std::isfinite(last_stats.critic_loss)
                                                       ? nlohmann::json(last_stats.critic_loss)
                                                       : nlohmann::json("non-finite")},
                                   {"actor_objective", last_stats.actor_objective},
                                   {"updates", agent.updates()},
                                   {"sigma", sigma}};
            throw TrainingDiverged("critic loss diverged at step " + std::to_string(steps),
                                   diag);
          }
        }
      }
      if (config.checkpoint_every > 0 && steps % config.checkpoint_every == 0 &&
          hooks.on_checkpoint) {
        hooks.on_checkpoint(agent.to_checkpoint(checkpoint_metadata(config, spec, steps)), steps);
      }
      if (out.done != Outcome::running || steps >= config.budget) {
        recent.push_back(out.done == Outcome::reached ? 1 : 0);
        if (static_cast<int>(recent.size()) > config.success_window) recent.pop_front();
        int wins = 0;
        for (int r : recent) wins += r;
        ++result.episodes;
        nlohmann::json rec = {
            {"episode", result.episodes},
            {"step", steps},
            {"return", episode_return},
            {"length", env->steps()},
            {"outcome", to_string(env->outcome())},
            {"success_rate", 100.0 * wins / static_cast<double>(recent.size())},
            {"critic_loss", have_stats ? nlohmann::json(last_stats.critic_loss) : nlohmann::json()},
            {"actor_objective",
             have_stats ? nlohmann::json(last_stats.actor_objective) : nlohmann::json()},
            {"sigma", sigma}};
        if (hooks.on_curve) hooks.on_curve(rec);
        result.curve.push_back(std::move(rec));
      }
    }
  }
  result.steps = steps;
  result.checkpoint = agent.to_checkpoint(checkpoint_metadata(config, spec, steps));
  return result;
}

std::unique_ptr<Policy> policy_from_checkpoint(const Checkpoint& checkpoint,
                                               const LidarConfig& lidar,
                                               const std::string& name) {
  const NetworkSpec spec = NetworkSpec::from_json(checkpoint.metadata.at("network"));
  if (spec.beams != lidar.beams) {
    throw std::invalid_argument("checkpoint was trained with " + std::to_string(spec.beams) +
                                " beams but the environment has " + std::to_string(lidar.beams));
  }
  std::mt19937_64 rng(0);
  ActorNet actor(spec, rng);
  const auto params = actor.parameters();
  for (nn::Parameter* p : params) {
    const NamedTensor* t = checkpoint.find(p->name);
    if (t == nullptr) throw std::runtime_error("checkpoint is missing tensor " + p->name);
    if (t->values.size() != static_cast<std::size_t>(p->value.size())) {
      throw std::runtime_error("checkpoint tensor " + p->name + " has the wrong size");
    }
    for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
        p->value(i, j) = t->values[static_cast<std::size_t>(i * p->value.cols() + j)];
      }
    }
  }
  return std::make_unique<ActorPolicy>(std::move(actor), name);
}

}  // namespace socnav
