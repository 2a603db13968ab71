#pragma once
/**
 * @file rewards.hpp
 * @brief Ego-safety, social-safety and goal terms of the step reward.
 *
 * The step reward is R = R_e + R_s + R_g.
 *
 *   R_e = -10                                  on contact (d <= 0)
 *       = -0.25 * (1 - d / (r + 0.4))          while d < r + 0.4
 *       = 0                                    otherwise
 *   R_s = -0.1 * violations / pedestrians_in_scene
 *   R_g = +10 on arrival, else -0.01 * |p - p*| / |p0 - p*|
 *
 * d is the surface distance from the robot body to the closest pedestrian
 * body or obstacle. A violation is a pedestrian within 5 m whose social zone
 * overlaps the robot's own zone.
 */

#include <span>

#include "socnav/crowd.hpp"
#include "socnav/geometry.hpp"

namespace socnav {

struct RewardParams {
  double collision_penalty = -10.0;
  double ego_margin = 0.4;
  double ego_scale = 0.25;
  double social_scale = 0.1;
  double social_horizon = 0.77;  ///< look-ahead time for the social zone
  double social_min_distance = 0.5;
  double social_radius = 5.0;    ///< only pedestrians this close are checked
  double stationary_speed = 0.05;
  double goal_bonus = 10.0;
  double progress_scale = 0.01;
};

struct EgoResult {
  double reward = 0.0;
  bool violation = false;
  bool collision = false;
  double closest = 0.0;  ///< +inf when nothing is nearby
};

/// Ego term against every pedestrian body and obstacle in `bodies`.
EgoResult ego_reward(const Circle& robot, std::span<const Shape> bodies,
                     const RewardParams& params = {});

/// Ego term from an already measured surface distance.
EgoResult ego_reward_from_distance(double closest, double robot_radius,
                                   const RewardParams& params = {});

/**
 * Zone anchored at the agent center reaching forward along `heading` by
 * r/2 + d_min + horizon * speed, spanning +-r sideways.
 */
OrientedRect social_zone(Vec2 position, double heading, double radius, double speed,
                         double horizon, double min_distance);

/// Zone of a pedestrian; a near-stationary one keeps its last motion heading.
OrientedRect pedestrian_zone(const Pedestrian& p, const RewardParams& params = {});

struct SocialResult {
  double reward = 0.0;
  int violations = 0;
  int considered = 0;
};

SocialResult social_reward(const OrientedRect& robot_zone, Vec2 robot_position,
                           std::span<const Pedestrian> pedestrians,
                           const RewardParams& params = {});

/// Progress ratio is capped at 1 so the term stays in [-0.01, 0].
double goal_reward(Vec2 position, Vec2 goal, Vec2 start, bool reached,
                   const RewardParams& params = {});

struct SafetyAssessment {
  double closest = 0.0;  ///< d_t
  bool ego_violation = false;
  bool collision = false;
  int violations = 0;
  int considered = 0;
  double ego = 0.0;     ///< R_e
  double social = 0.0;  ///< R_s
  double goal = 0.0;    ///< R_g

  double total() const { return ego + social + goal; }
};

struct RobotSnapshot {
  Circle body;
  double heading = 0.0;
  double speed = 0.0;
};

/**
 * Full reward evaluation from simulator state. With include_social false the
 * social term is reported as 0 while violation counts are still measured.
 */
SafetyAssessment assess(const RobotSnapshot& robot, std::span<const Pedestrian> pedestrians,
                        std::span<const Shape> obstacles, Vec2 goal, Vec2 start, bool reached,
                        bool include_social, const RewardParams& params = {});

}  // namespace socnav
