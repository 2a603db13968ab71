#pragma once
/**
 * @file crowd.hpp
 * @brief ORCA pedestrian crowd with stop-and-go and walk-in randomization.
 *
 * Pedestrians see each other and the static obstacles. They never see the
 * robot: no function in this header takes robot state.
 */

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

struct BehaviorState {
  bool stopped = false;
  int remaining_steps = 0;  ///< steps left in the current stop
};

struct Pedestrian {
  int id = 0;
  Vec2 position;
  Vec2 velocity;
  double pref_speed = 1.0;
  double radius = 0.3;  ///< bounding circle used by ORCA and the social zone
  Vec2 goal;
  /// Rendered body: circle of `radius`, or a rectangle inscribed in it.
  bool rect_body = false;
  double body_aspect = 0.0;  ///< rect half-width / half-length angle, radians
  double motion_heading = 0.0;  ///< last heading with noticeable speed
  BehaviorState behavior;

  /// Shape seen by the scanner and used for collision checks.
  Shape body() const;
  Circle bounding() const { return Circle(position, radius); }
};

struct Area {
  Vec2 center;
  Vec2 half_extent{2.5, 2.5};

  bool contains(Vec2 p) const;
};

struct CrowdConfig {
  int count = 8;
  Area area;
  double walk_in_probability = 0.0;  ///< per crowd step
  double stop_go_probability = 0.0;  ///< per crowd step, for walking pedestrians
  double stop_mean_duration = 1.0;   ///< seconds
  double speed_min = 0.5;
  double speed_max = 1.5;
  double radius_min = 0.15;
  double radius_max = 0.4;
  double rect_probability = 0.3;     ///< chance a pedestrian renders as a rectangle
  int max_count = -1;                ///< walk-in cap; negative means count + 4
  std::uint64_t seed = 0;

  void validate() const;
  int population_cap() const { return max_count >= 0 ? max_count : count + 4; }
};

struct OrcaParams {
  double time_horizon = 2.0;
  double time_horizon_obstacles = 1.0;
  double neighbor_distance = 5.0;
  int max_neighbors = 10;
  double goal_tolerance = 0.05;  ///< "on the goal" radius for the preferred velocity
};

/// Velocity heading straight to the goal at preferred speed, slowed to land on it.
Vec2 preferred_velocity(const Pedestrian& self, double dt);

/**
 * One ORCA solve. Builds a half-plane per neighbor (shared responsibility)
 * and per nearby obstacle (full responsibility, from the supporting line at
 * the closest surface point), then picks the feasible velocity closest to the
 * preferred one under |v| <= pref_speed. When the constraints conflict the
 * agent lines are relaxed by the 3D program while obstacle lines stay hard.
 * A stopped pedestrian prefers zero velocity.
 */
Vec2 orca_velocity(const Pedestrian& self, std::span<const Pedestrian> neighbors,
                   std::span<const Shape> obstacles, const OrcaParams& params, double dt);

/// Draws a fresh pedestrian with randomized speed, size and body shape.
Pedestrian sample_pedestrian(int id, Vec2 position, Vec2 goal, const CrowdConfig& config,
                             std::mt19937_64& rng);

/**
 * Synchronous crowd update: all ORCA velocities come from the same snapshot,
 * then positions are committed. Also runs stop-and-go transitions, goal
 * re-sampling and boundary walk-ins.
 */
void step_crowd(std::vector<Pedestrian>& peds, const CrowdConfig& config,
                std::span<const Shape> obstacles, double dt, std::mt19937_64& rng,
                const OrcaParams& params = {});

enum class ScenarioKind { crossing, towards, ahead, random };

std::string_view to_string(ScenarioKind kind);
/// Throws std::invalid_argument for an unknown name.
ScenarioKind parse_scenario_kind(std::string_view name);

/**
 * Places `count` pedestrians in config.area (overrides config.count) with the
 * flow pattern of `kind` relative to the robot's start-to-goal axis.
 */
std::vector<Pedestrian> spawn_scenario(ScenarioKind kind, int count, Vec2 robot_start,
                                       Vec2 robot_goal, const CrowdConfig& config,
                                       std::mt19937_64& rng);

/// Uniform random placement for training crowds.
std::vector<Pedestrian> spawn_random_crowd(const CrowdConfig& config,
                                           std::span<const Shape> obstacles,
                                           std::span<const Vec2> keep_clear,
                                           std::mt19937_64& rng);

}  // namespace socnav
