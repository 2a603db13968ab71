#pragma once
/**
 * @file ddpg.hpp
 * @brief Replay buffer, DDPG learner and checkpoint container.
 */

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "socnav/nn.hpp"
#include "socnav/policy.hpp"

namespace socnav {

/// Training minibatch; one column per transition.
struct Batch {
  nn::Matrix images;
  nn::Matrix goals;
  nn::Matrix actions;
  nn::Vector rewards;
  nn::Vector dones;  ///< 1 for terminal transitions, 0 otherwise
  nn::Matrix next_images;
  nn::Matrix next_goals;

  int size() const { return static_cast<int>(rewards.size()); }
};

/**
 * Ring buffer of (o, a, r, o', done) with FIFO eviction and uniform sampling.
 *
 * Observations are not stored as full feature matrices. The buffer keeps the
 * raw scan stream (float ranges plus capture heading) and, per transition,
 * the index of the newest scan, the first scan of its episode and the goal
 * vector. Sampling rebuilds each motion feature exactly as the environment
 * does: the last `rows` scans, padded with the episode's first scan and
 * calibrated to the newest heading. At 180 beams this stores ~3 KB per step
 * instead of ~115 KB.
 *
 * Usage per episode: begin_episode(first scan, goal) then one record() per
 * environment step with the scans captured during that step.
 */
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, const LidarConfig& lidar, const NetworkSpec& spec,
               int max_scans_per_step);

  void begin_episode(const Scan& first, GoalVector goal, double goal_reference);
  /// Throws std::logic_error outside an episode or with too many scans.
  void record(Action action, double reward, bool terminal, std::span<const Scan> new_scans,
              GoalVector next_goal);

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }

  /// Throws std::invalid_argument when batch_size exceeds size().
  Batch sample(int batch_size, std::mt19937_64& rng) const;
  /// Explicit transitions, oldest first = index 0.
  Batch gather(std::span<const std::size_t> indices) const;

  /// Feature the buffer would hand the networks for transition i (next=false: o).
  MotionFeature feature(std::size_t i, bool next) const;

 private:
  struct ObsRef {
    std::int64_t newest = 0;
    std::int64_t first = 0;
    GoalVector goal;
    double goal_reference = 1.0;
  };
  struct Transition {
    ObsRef obs;
    ObsRef next;
    Action action;
    double reward = 0.0;
    bool terminal = false;
  };

  void push_scan(const Scan& scan);
  void fill_image(const ObsRef& ref, double* out) const;
  std::size_t slot(std::size_t i) const { return (head_ + i) % capacity_; }

  std::size_t capacity_;
  LidarConfig lidar_;
  NetworkSpec spec_;
  int max_scans_per_step_;

  std::vector<Transition> transitions_;
  std::size_t head_ = 0;  ///< oldest transition slot
  std::size_t count_ = 0;

  std::size_t scan_capacity_;
  std::vector<float> scan_ranges_;
  std::vector<double> scan_headings_;
  std::int64_t scans_written_ = 0;

  bool in_episode_ = false;
  ObsRef current_;
};

struct DdpgConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  int batch_size = 128;
  std::size_t buffer_capacity = 200000;
  /// Rewards are multiplied by this before entering the critic target.
  double reward_scale = 1.0;

  nlohmann::json to_json() const;
  static DdpgConfig from_json(const nlohmann::json& j);
};

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  ///< mean Q(o, mu(o)) before the actor step
};

/// Named tensor with row-major values.
struct NamedTensor {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<double> values;
};

/**
 * Self-describing checkpoint: JSON metadata plus named tensors. The binary
 * layout (little-endian) is
 *
 *   "SNCKPT01" | u64 metadata bytes | metadata JSON |
 *   u64 tensor count | per tensor: u32 name bytes, name, u32 rank,
 *   i64 dims[rank], f64 values[prod(dims)]
 */
struct Checkpoint {
  nlohmann::json metadata;
  std::vector<NamedTensor> tensors;

  const NamedTensor* find(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
/// Throws std::runtime_error on a malformed or truncated file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a hash of the canonical network and lidar description.
std::string config_hash(const NetworkSpec& spec, const LidarConfig& lidar);

class DdpgAgent {
 public:
  DdpgAgent(const NetworkSpec& spec, const DdpgConfig& config, std::uint64_t seed);

  /// Deterministic actor output.
  Action act(const MotionFeature& feature) { return actor_.act(feature); }

  /// Critic step, then actor step, then soft target update.
  UpdateStats update(const Batch& batch);

  /// theta' <- tau * theta + (1 - tau) * theta'
  void soft_update(double tau);

  /// Critic targets y = scale * r + gamma * (1 - done) * Q'(o', mu'(o')).
  nn::Vector critic_targets(const Batch& batch);

  ActorNet& actor() { return actor_; }
  CriticNet& critic() { return critic_; }
  ActorNet& target_actor() { return target_actor_; }
  CriticNet& target_critic() { return target_critic_; }
  const DdpgConfig& config() const { return config_; }
  const NetworkSpec& spec() const { return spec_; }
  long long updates() const { return updates_; }

  Checkpoint to_checkpoint(const nlohmann::json& extra_metadata = {}) ;
  /// Restores weights, targets and optimizer state; throws on missing tensors.
  void load(const Checkpoint& checkpoint);
  static DdpgAgent from_checkpoint(const Checkpoint& checkpoint);

 private:
  NetworkSpec spec_;
  DdpgConfig config_;
  ActorNet actor_;
  CriticNet critic_;
  ActorNet target_actor_;
  CriticNet target_critic_;
  nn::Adam actor_opt_;
  nn::Adam critic_opt_;
  long long updates_ = 0;
};

/// Copy every parameter value from `from` into `to` (same architecture).
void copy_parameters(const std::vector<nn::Parameter*>& from, const std::vector<nn::Parameter*>& to);

}  // namespace socnav
