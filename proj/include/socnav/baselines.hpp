#pragma once
/**
 * @file baselines.hpp
 * @brief Greedy laser-scan planner and a hook for external full-state policies.
 */

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "socnav/lidar.hpp"
#include "socnav/policy.hpp"

namespace socnav {

struct GreedyParams {
  int window_at_180 = 21;      ///< box window in beams for a 180-beam scan
  double goal_weight = 2.0;    ///< lambda, meters of clearance per radian of detour
  double turn_gain = 1.5;      ///< k_p
  double stop_clearance = 0.5; ///< windows below this never win; with none left the robot rotates
  double speed_gain = 0.8;     ///< forward speed per meter of window clearance
  double horizon = 3.0;        ///< free range counts up to this far (or the goal)
  double robot_radius = 0.3;
  /// Score free travel of the robot disc instead of raw ranges (stronger, off by default).
  bool width_aware = false;
  double max_speed = 1.5;
  double max_turn_rate = 2.0;

  /// Window length for `beams`, scaled from the 180-beam value and kept odd.
  int window(int beams) const;
};

struct GreedyPlan {
  Twist twist;
  int best_index = -1;
  bool stopped = false;
  std::vector<double> clearance;  ///< windowed mean range per beam
  std::vector<double> score;
};

/// Distance the robot disc can advance along each beam before touching a scan point.
std::vector<double> free_travel(const Scan& scan, const LidarConfig& lidar, double radius);

/**
 * Scores beam i by the windowed mean free range minus
 * lambda * |angle_i - goal_bearing| and steers toward the best beam. Free
 * range is the raw reading (or free travel when width_aware), capped at
 * min(horizon, goal distance + robot radius) so distant walls cannot outbid
 * the goal direction. Speed scales with the winning window's clearance.
 * Ties go to the beam closer to the goal bearing, then to the lowest index.
 */
GreedyPlan greedy_plan(const Scan& scan, double goal_bearing, double goal_distance,
                       const LidarConfig& lidar, const GreedyParams& params = {});

class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(LidarConfig lidar, GreedyParams params = {})
      : lidar_(lidar), params_(params) {}
  std::string name() const override { return "greedy"; }
  Command act(const Observation& obs) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<GreedyPolicy>(*this); }

 private:
  LidarConfig lidar_;
  GreedyParams params_;
};

/// What a full-state planner sees: the robot, its goal and every pedestrian.
struct FullState {
  const RobotState& robot;
  Vec2 goal;
  GoalVector goal_vector;
  std::span<const Pedestrian> pedestrians;
};

using FullStatePlanner = std::function<Twist(const FullState&)>;

/**
 * Adapter for planners that read simulator state instead of scans, such as
 * CADRL. No model ships with this project; callers provide the planner.
 */
class ExternalPolicy final : public Policy {
 public:
  ExternalPolicy(std::string name, FullStatePlanner planner);
  std::string name() const override { return name_; }
  Command act(const Observation& obs) override;
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<ExternalPolicy>(*this);
  }

 private:
  std::string name_;
  FullStatePlanner planner_;
};

/// Always throws std::runtime_error: CADRL weights are not bundled.
std::unique_ptr<Policy> make_cadrl_policy();

}  // namespace socnav
