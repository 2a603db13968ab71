#pragma once
/**
 * @file world.hpp
 * @brief Episode engine: random maps, robot kinematics, multi-rate clocking,
 * observation assembly and termination.
 *
 * One policy step runs scan_hz / policy_hz scanner ticks. The inner heading
 * controller refreshes its turn-rate command every scan_hz / control_hz
 * ticks and holds it in between; robot and crowd advance every scanner tick.
 */

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "socnav/crowd.hpp"
#include "socnav/geometry.hpp"
#include "socnav/lidar.hpp"
#include "socnav/rewards.hpp"

namespace socnav {

inline constexpr double kActionLimit = 1.5;

struct Twist {
  double linear = 0.0;   ///< m/s
  double angular = 0.0;  ///< rad/s, or heading offset when produced by action_to_twist
};

/// Policy output; both components live in [-1.5, 1.5].
struct Action {
  double ax = 0.0;
  double ay = 0.0;

  Action clamped() const;
};

/**
 * v_l = |a| capped at 1.5 m/s, v_w = atan2(a_y, a_x). The angular part is a
 * heading offset for the inner controller, not a raw turn rate.
 */
Twist action_to_twist(Action a);

struct RobotState {
  Pose pose;
  Twist twist;  ///< last applied linear speed and turn rate
  double radius = 0.3;
};

/// Exact unicycle arc for a held (v, omega) over dt.
RobotState integrate(const RobotState& robot, Twist twist, double dt);

struct ControllerParams {
  double heading_gain = 2.0;
  double max_turn_rate = 2.0;  ///< rad/s
  double max_speed = kActionLimit;
};

/// Turn-rate command tracking `target_heading`.
double heading_control(double heading, double target_heading, const ControllerParams& params);

struct Arena {
  Vec2 center;
  Vec2 half_extent{5.0, 5.0};
};

struct MapConfig {
  int count_min = 0;
  int count_max = 0;
  double size_min = 0.2;  ///< circle radius / box half-length
  double size_max = 0.6;
  double rect_probability = 0.5;
  double keep_clear = 0.8;  ///< free disc around start and goal
  bool walls = true;
  Arena arena;
  double corridor_resolution = 0.2;
  double corridor_margin = 0.15;  ///< extra clearance over the robot radius
  int max_attempts = 100;

  void validate() const;
};

/// Four wall segments along the arena boundary.
std::vector<Shape> arena_walls(const Arena& arena);

/**
 * Grid BFS from start to goal over cells whose centers clear every shape by
 * more than `clearance`. Cell centers sit on a lattice through arena.center.
 */
bool corridor_exists(std::span<const Shape> shapes, Vec2 start, Vec2 goal, const Arena& arena,
                     double clearance, double resolution);

/**
 * Samples static obstacles (walls included when enabled). Deterministic per
 * seed. Throws std::runtime_error when no connected map is found within
 * max_attempts.
 */
std::vector<Shape> randomize_map(std::uint64_t seed, const MapConfig& config, Vec2 start,
                                 Vec2 goal, double robot_radius);

struct Rates {
  int scan_hz = 40;
  int control_hz = 20;
  int policy_hz = 10;

  int ticks_per_policy() const { return scan_hz / policy_hz; }
  int ticks_per_control() const { return scan_hz / control_hz; }
};

struct EnvConfig {
  std::uint64_t map_seed = 0;
  MapConfig map;
  CrowdConfig crowd;
  std::optional<ScenarioKind> scenario;  ///< scripted crowd instead of uniform placement
  Vec2 start{-2.5, 0.0};
  double start_heading = 0.0;
  Vec2 goal{2.5, 0.0};
  int max_steps = 400;
  double goal_tolerance = 0.3;
  Rates rates;
  LidarConfig lidar;
  double robot_radius = 0.3;
  ControllerParams controller;
  RewardParams rewards;
  OrcaParams orca;
  bool include_social_reward = true;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

enum class Outcome { running, reached, collided, timeout };
std::string_view to_string(Outcome outcome);

struct RewardParts {
  double ego = 0.0;
  double social = 0.0;
  double goal = 0.0;
  double total() const { return ego + social + goal; }
};

struct StepInfo {
  double closest = 0.0;
  bool ego_violation = false;
  int social_violations = 0;
  int considered = 0;
  double sim_time = 0.0;
  int steps = 0;
};

struct StepOutcome {
  MotionFeature observation;
  double reward = 0.0;
  RewardParts parts;
  Outcome done = Outcome::running;
  StepInfo info;
};

/// What a policy may send: a learned action or a direct (v, omega) twist.
using Command = std::variant<Action, Twist>;

class Environment {
 public:
  explicit Environment(EnvConfig config);

  /// Builds map and crowd from the config seeds, returns the first observation.
  MotionFeature reset();
  /// Throws std::logic_error when the episode already finished.
  StepOutcome step(const Command& command);

  MotionFeature observe() const;

  const EnvConfig& config() const { return config_; }
  const RobotState& robot() const { return robot_; }
  const std::vector<Pedestrian>& pedestrians() const { return peds_; }
  const std::vector<Shape>& obstacles() const { return obstacles_; }
  const Scan& latest_scan() const { return history_.latest(); }
  /// Raw scans captured during the last reset() or step(), oldest first.
  const std::vector<Scan>& step_scans() const { return step_scans_; }
  Outcome outcome() const { return outcome_; }
  double sim_time() const { return static_cast<double>(ticks_) / config_.rates.scan_hz; }
  int steps() const { return steps_; }
  GoalVector goal_vector() const { return relative_goal(robot_.pose, config_.goal); }

 private:
  std::vector<Shape> world_shapes() const;
  double robot_clearance() const;
  void capture_scan();

  EnvConfig config_;
  RobotState robot_;
  std::vector<Shape> obstacles_;
  std::vector<Pedestrian> peds_;
  ScanHistory history_;
  std::vector<Scan> step_scans_;
  std::mt19937_64 crowd_rng_;
  std::mt19937_64 noise_rng_;
  std::int64_t ticks_ = 0;
  int steps_ = 0;
  Outcome outcome_ = Outcome::running;
  bool started_ = false;
};

}  // namespace socnav
