#include "socnav/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace socnav {

int GreedyParams::window(int beams) const {
  int w = static_cast<int>(std::lround(window_at_180 * static_cast<double>(beams) / 180.0));
  if (w % 2 == 0) ++w;
  return std::clamp(w, 1, beams % 2 == 0 ? beams - 1 : beams);
}

std::vector<double> free_travel(const Scan& scan, const LidarConfig& lidar, double radius) {
  const int beams = lidar.beams;
  std::vector<Vec2> points(static_cast<std::size_t>(beams));
  for (int j = 0; j < beams; ++j) {
    points[j] = Vec2::from_angle(lidar.beam_angle(j)) * scan.ranges[j];
  }
  std::vector<double> out(static_cast<std::size_t>(beams));
  for (int i = 0; i < beams; ++i) {
    const Vec2 dir = Vec2::from_angle(lidar.beam_angle(i));
    double best = scan.ranges[i];
    for (int j = 0; j < beams; ++j) {
      if (scan.ranges[j] >= lidar.range_max) continue;  // no return
      const double along = points[j].dot(dir);
      const double lateral = std::abs(points[j].cross(dir));
      if (along <= 0.0 || lateral >= radius) continue;
      best = std::min(best, along - std::sqrt(radius * radius - lateral * lateral));
    }
    out[i] = std::max(0.0, best);
  }
  return out;
}

GreedyPlan greedy_plan(const Scan& scan, double goal_bearing, double goal_distance,
                       const LidarConfig& lidar, const GreedyParams& params) {
  const int beams = lidar.beams;
  if (static_cast<int>(scan.ranges.size()) != beams) {
    throw std::invalid_argument("scan beam count does not match lidar config");
  }
  const int half = params.window(beams) / 2;
  const std::vector<double> travel =
      params.width_aware ? free_travel(scan, lidar, params.robot_radius) : scan.ranges;

  GreedyPlan plan;
  plan.clearance.resize(static_cast<std::size_t>(beams));
  plan.score.resize(static_cast<std::size_t>(beams));
  const double cap =
      std::max(params.stop_clearance, std::min(params.horizon, goal_distance + params.robot_radius));
  std::vector<double> prefix(static_cast<std::size_t>(beams) + 1, 0.0);
  for (int i = 0; i < beams; ++i) prefix[i + 1] = prefix[i] + std::min(travel[i], cap);

  bool any_open = false;
  double best_score = 0.0;
  double best_offset = 0.0;
  for (int i = 0; i < beams; ++i) {
    // Box window truncated at the fan edges.
    const int lo = std::max(0, i - half);
    const int hi = std::min(beams - 1, i + half);
    const double mean = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    const double offset = std::abs(lidar.beam_angle(i) - goal_bearing);
    const double score = mean - params.goal_weight * offset;
    plan.clearance[i] = mean;
    plan.score[i] = score;
    // Windows tighter than the stop clearance never win.
    if (mean < params.stop_clearance) continue;
    if (!any_open || score > best_score || (score == best_score && offset < best_offset)) {
      any_open = true;
      plan.best_index = i;
      best_score = score;
      best_offset = offset;
    }
  }

  if (!any_open) {
    plan.stopped = true;
    const double side = goal_bearing >= 0.0 ? 1.0 : -1.0;
    plan.twist = {0.0, side * params.max_turn_rate};
    return plan;
  }

  const double steer = lidar.beam_angle(plan.best_index);
  double room = plan.clearance[static_cast<std::size_t>(plan.best_index)];
  if (params.width_aware) {
    // The robot first moves along its current heading, then along the chosen beam.
    const int ahead = static_cast<int>(std::lround(0.5 * lidar.fov / lidar.increment()));
    room = std::min(travel[static_cast<std::size_t>(std::clamp(ahead, 0, beams - 1))],
                    travel[static_cast<std::size_t>(plan.best_index)]);
  }
  double speed = std::min(params.max_speed, params.speed_gain * room);
  speed *= std::max(0.0, std::cos(std::min(std::abs(steer), kPi / 2)));
  speed = std::min(speed, std::max(goal_distance, 0.0));
  plan.twist = {std::clamp(speed, 0.0, params.max_speed),
                std::clamp(params.turn_gain * steer, -params.max_turn_rate, params.max_turn_rate)};
  return plan;
}

Command GreedyPolicy::act(const Observation& obs) {
  return greedy_plan(obs.scan, obs.feature.goal.bearing, obs.feature.goal.distance, lidar_,
                     params_)
      .twist;
}

ExternalPolicy::ExternalPolicy(std::string name, FullStatePlanner planner)
    : name_(std::move(name)), planner_(std::move(planner)) {
  if (!planner_) throw std::invalid_argument("external policy needs a planner");
}

Command ExternalPolicy::act(const Observation& obs) {
  const Vec2 goal = obs.robot.pose.position +
                    Vec2::from_angle(obs.robot.pose.heading + obs.feature.goal.bearing) *
                        obs.feature.goal.distance;
  return planner_(FullState{obs.robot, goal, obs.feature.goal, obs.pedestrians});
}

std::unique_ptr<Policy> make_cadrl_policy() {
  throw std::runtime_error(
      "cadrl: no model is bundled; wrap a CADRL implementation in ExternalPolicy");
}

}  // namespace socnav
