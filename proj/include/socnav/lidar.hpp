#pragma once
/**
 * @file lidar.hpp
 * @brief Planar laser scanner model and the heading-calibrated scan history.
 *
 * Beams fan out counter-clockwise from heading - fov/2 to heading + fov/2,
 * so index 0 is the rightmost beam. Readings are clamped to
 * [range_min, range_max]; no-return beams read range_max.
 */

#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

struct Pose {
  Vec2 position;
  double heading = 0.0;
};

struct LidarConfig {
  int beams = 1080;
  double fov = 1.5 * kPi;  // 270 degrees
  double range_min = 0.1;
  double range_max = 10.0;
  double noise_sigma = 0.0;  ///< Gaussian range noise; 0 disables it

  /// Angular spacing between neighboring beams.
  double increment() const { return fov / static_cast<double>(beams - 1); }
  /// Bearing of beam i relative to the sensor heading.
  double beam_angle(int i) const { return -0.5 * fov + increment() * i; }
  void validate() const;
};

struct Scan {
  std::vector<double> ranges;
  double heading_at_capture = 0.0;
  std::int64_t timestamp = 0;  ///< scanner tick index
};

/**
 * Casts every beam against `world`. When `rng` is non-null and the config
 * has noise_sigma > 0, each reading gets additive Gaussian noise before
 * clamping.
 */
Scan simulate_scan(std::span<const Shape> world, const Pose& pose, const LidarConfig& config,
                   std::int64_t timestamp = 0, std::mt19937_64* rng = nullptr);

/// Beam-index shift that re-expresses a scan taken at `from` in the frame of `to`.
int calibration_shift(double from_heading, double to_heading, const LidarConfig& config);

/**
 * Re-expresses `prev` in the sensor frame at `current_heading` by circularly
 * shifting the beam array; beams that rotate in from outside the old fan
 * read range_max. The result carries the quantized heading it now represents.
 */
Scan calibrate(const Scan& prev, double current_heading, const LidarConfig& config);

/// Goal relative to the robot: distance and bearing in the robot frame.
struct GoalVector {
  double distance = 0.0;
  double bearing = 0.0;
};

GoalVector relative_goal(const Pose& robot, Vec2 goal);

/// Time x beam matrix of calibrated scans, oldest row first.
struct MotionFeature {
  int rows = 0;
  int beams = 0;
  std::vector<double> matrix;  ///< row-major rows x beams
  GoalVector goal;
  /// Start-to-goal distance used to normalize goal.distance for the networks.
  double goal_reference = 1.0;

  double at(int row, int beam) const { return matrix[static_cast<std::size_t>(row) * beams + beam]; }
  std::span<const double> row(int r) const {
    return {matrix.data() + static_cast<std::size_t>(r) * beams, static_cast<std::size_t>(beams)};
  }
};

inline constexpr int kHistoryLength = 40;

/// Throws std::invalid_argument when history is empty or beam counts disagree.
MotionFeature build_motion_feature(std::span<const Scan> history, double current_heading,
                                   GoalVector goal, const LidarConfig& config,
                                   double goal_reference = 1.0);

/// Fixed-length FIFO of raw scans; the first scan seeds every slot.
class ScanHistory {
 public:
  explicit ScanHistory(int length = kHistoryLength) : length_(length) {}

  void reset(const Scan& first);
  void push(Scan scan);
  bool empty() const { return scans_.empty(); }
  const Scan& latest() const { return scans_.back(); }
  std::vector<Scan> snapshot() const { return {scans_.begin(), scans_.end()}; }
  int length() const { return length_; }

 private:
  int length_;
  std::deque<Scan> scans_;
};

}  // namespace socnav
