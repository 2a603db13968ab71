#include "socnav/rewards.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace socnav {

EgoResult ego_reward_from_distance(double closest, double robot_radius,
                                   const RewardParams& params) {
  EgoResult out;
  out.closest = closest;
  const double zone = robot_radius + params.ego_margin;
  out.violation = closest < zone;
  out.collision = closest <= 0.0;
  if (out.collision) {
    out.reward = params.collision_penalty;
  } else if (out.violation) {
    out.reward = -params.ego_scale * (1.0 - closest / zone);
  }
  return out;
}

EgoResult ego_reward(const Circle& robot, std::span<const Shape> bodies,
                     const RewardParams& params) {
  const double closest = bodies.empty() ? std::numeric_limits<double>::infinity()
                                        : closest_distance(robot, bodies);
  return ego_reward_from_distance(closest, robot.radius(), params);
}

OrientedRect social_zone(Vec2 position, double heading, double radius, double speed,
                         double horizon, double min_distance) {
  if (speed < 0.0) throw std::invalid_argument("social zone speed must be nonnegative");
  const double length = 0.5 * radius + min_distance + horizon * speed;
  return {position, heading, radius, length};
}

OrientedRect pedestrian_zone(const Pedestrian& p, const RewardParams& params) {
  const double speed = p.velocity.norm();
  const double heading = speed >= params.stationary_speed ? p.velocity.angle() : p.motion_heading;
  return social_zone(p.position, heading, p.radius, speed, params.social_horizon,
                     params.social_min_distance);
}

SocialResult social_reward(const OrientedRect& robot_zone, Vec2 robot_position,
                           std::span<const Pedestrian> pedestrians,
                           const RewardParams& params) {
  SocialResult out;
  if (pedestrians.empty()) return out;
  for (const Pedestrian& p : pedestrians) {
    if ((p.position - robot_position).norm() > params.social_radius) continue;
    ++out.considered;
    if (rects_intersect(robot_zone, pedestrian_zone(p, params))) ++out.violations;
  }
  out.reward = -params.social_scale * static_cast<double>(out.violations) /
               static_cast<double>(pedestrians.size());
  return out;
}

double goal_reward(Vec2 position, Vec2 goal, Vec2 start, bool reached,
                   const RewardParams& params) {
  if (reached) return params.goal_bonus;
  const double initial = (start - goal).norm();
  if (!(initial > 0.0)) throw std::invalid_argument("goal reward needs start != goal");
  const double ratio = std::min((position - goal).norm() / initial, 1.0);
  return -params.progress_scale * ratio;
}

SafetyAssessment assess(const RobotSnapshot& robot, std::span<const Pedestrian> pedestrians,
                        std::span<const Shape> obstacles, Vec2 goal, Vec2 start, bool reached,
                        bool include_social, const RewardParams& params) {
  double closest = std::numeric_limits<double>::infinity();
  if (!obstacles.empty()) closest = closest_distance(robot.body, obstacles);
  for (const Pedestrian& p : pedestrians) {
    closest = std::min(closest, surface_distance(robot.body, p.body()));
  }
  const EgoResult ego = ego_reward_from_distance(closest, robot.body.radius(), params);

  const OrientedRect zone =
      social_zone(robot.body.center(), robot.heading, robot.body.radius(),
                  std::max(robot.speed, 0.0), params.social_horizon, params.social_min_distance);
  const SocialResult social = social_reward(zone, robot.body.center(), pedestrians, params);

  SafetyAssessment a;
  a.closest = closest;
  a.ego_violation = ego.violation;
  a.collision = ego.collision;
  a.violations = social.violations;
  a.considered = social.considered;
  a.ego = ego.reward;
  a.social = include_social ? social.reward : 0.0;
  // A collision ends the episode, so it never also pays the arrival bonus.
  a.goal = goal_reward(robot.body.center(), goal, start, reached && !ego.collision, params);
  return a;
}

}  // namespace socnav
