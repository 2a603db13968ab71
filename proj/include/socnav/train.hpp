#pragma once
/**
 * @file train.hpp
 * @brief Staged DDPG training on randomized maps and crowds.
 *
 * The ego stage trains on static maps with sparse crowds and no social term.
 * The social stage starts from an ego checkpoint and trains on scripted crowd
 * scenarios with the social term enabled. Training is single-threaded and
 * fully determined by the seed.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "socnav/ddpg.hpp"
#include "socnav/world.hpp"

namespace socnav {

enum class Stage { ego, social };
std::string_view to_string(Stage stage);
/// Throws std::invalid_argument for anything but "ego" or "social".
Stage parse_stage(std::string_view name);

struct Curriculum {
  int obstacles_min = 0;
  int obstacles_max = 0;
  int pedestrians_min = 0;
  int pedestrians_max = 0;
  bool scenarios = false;  ///< scripted crowd kinds instead of uniform placement
  double goal_distance_min = 2.0;
  double goal_distance_max = 7.0;

  static Curriculum ego();
  static Curriculum social();
};

struct TrainConfig {
  Stage stage = Stage::ego;
  long long budget = 100000;  ///< environment steps
  std::uint64_t seed = 0;
  std::string network = "desk";  ///< "desk" or "standard"
  DdpgConfig ddpg;
  Curriculum curriculum = Curriculum::ego();
  EnvConfig env;                ///< base environment; per-episode fields are overwritten
  double sigma_start = 0.5;
  double sigma_end = 0.05;
  long long warmup = 2000;      ///< steps before the first update
  int update_every = 1;
  int updates_per_step = 1;
  long long checkpoint_every = 0;  ///< 0 disables periodic checkpoints
  int episode_steps = 250;
  int success_window = 50;      ///< episodes in the rolling success rate
  double divergence_threshold = 1e6;
  bool allow_cold_social = false;

  /// Defaults for a stage: curriculum, 180-beam lidar, social term on or off.
  static TrainConfig for_stage(Stage stage);
  nlohmann::json to_json() const;
  /// Overlays `j` on for_stage(stage in j, default ego).
  static TrainConfig from_json(const nlohmann::json& j);
  NetworkSpec network_spec() const;
};

/// Raised when the critic loss exceeds the divergence threshold.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, nlohmann::json diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const nlohmann::json& diagnostics() const { return diagnostics_; }

 private:
  nlohmann::json diagnostics_;
};

struct TrainHooks {
  /// One record per finished episode.
  std::function<void(const nlohmann::json&)> on_curve;
  /// Periodic checkpoints, with the step count at which they were taken.
  std::function<void(const Checkpoint&, long long)> on_checkpoint;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<nlohmann::json> curve;
  long long steps = 0;
  int episodes = 0;
};

/// Episode `index` of the curriculum, drawn from the training seed.
EnvConfig sample_training_env(const TrainConfig& config, long long index);

/**
 * Runs DDPG for config.budget environment steps. The social stage requires
 * `warm_start` unless allow_cold_social is set. Throws TrainingDiverged,
 * std::invalid_argument on bad input.
 */
TrainResult train(const TrainConfig& config, const std::optional<Checkpoint>& warm_start,
                  const TrainHooks& hooks = {});

/// Actor policy from a checkpoint; throws when its beam count differs from `lidar`.
std::unique_ptr<Policy> policy_from_checkpoint(const Checkpoint& checkpoint,
                                               const LidarConfig& lidar,
                                               const std::string& name);

}  // namespace socnav
