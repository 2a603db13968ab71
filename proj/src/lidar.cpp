#include "socnav/lidar.hpp"

#include <algorithm>
#include <stdexcept>

namespace socnav {

void LidarConfig::validate() const {
  if (beams < 2) throw std::invalid_argument("lidar needs at least two beams");
  if (!(fov > 0.0) || fov > 2.0 * kPi) throw std::invalid_argument("lidar fov out of range");
  if (!(range_min > 0.0) || !(range_max > range_min)) {
    throw std::invalid_argument("lidar range limits invalid");
  }
  if (noise_sigma < 0.0) throw std::invalid_argument("negative lidar noise");
}

Scan simulate_scan(std::span<const Shape> world, const Pose& pose, const LidarConfig& config,
                   std::int64_t timestamp, std::mt19937_64* rng) {
  Scan scan;
  scan.heading_at_capture = normalize_angle(pose.heading);
  scan.timestamp = timestamp;
  scan.ranges.resize(static_cast<std::size_t>(config.beams));
  std::normal_distribution<double> noise(0.0, config.noise_sigma);
  const bool noisy = rng != nullptr && config.noise_sigma > 0.0;
  for (int i = 0; i < config.beams; ++i) {
    const Vec2 dir = Vec2::from_angle(pose.heading + config.beam_angle(i));
    double r = ray_cast(pose.position, dir, world, config.range_max);
    if (noisy && r < config.range_max) r += noise(*rng);
    scan.ranges[static_cast<std::size_t>(i)] = std::clamp(r, config.range_min, config.range_max);
  }
  return scan;
}

int calibration_shift(double from_heading, double to_heading, const LidarConfig& config) {
  const double delta = normalize_angle(to_heading - from_heading);
  return static_cast<int>(std::lround(delta / config.increment()));
}

Scan calibrate(const Scan& prev, double current_heading, const LidarConfig& config) {
  const int beams = static_cast<int>(prev.ranges.size());
  if (beams != config.beams) throw std::invalid_argument("scan beam count does not match config");
  const int shift = calibration_shift(prev.heading_at_capture, current_heading, config);
  Scan out;
  out.timestamp = prev.timestamp;
  out.heading_at_capture =
      normalize_angle(prev.heading_at_capture + shift * config.increment());
  out.ranges.assign(prev.ranges.size(), config.range_max);
  // Beam i now looks where beam i + shift looked before.
  const int lo = std::max(0, -shift);
  const int hi = std::min(beams, beams - shift);
  for (int i = lo; i < hi; ++i) {
    out.ranges[static_cast<std::size_t>(i)] = prev.ranges[static_cast<std::size_t>(i + shift)];
  }
  return out;
}

GoalVector relative_goal(const Pose& robot, Vec2 goal) {
  const Vec2 d = goal - robot.position;
  GoalVector g;
  g.distance = d.norm();
  g.bearing = g.distance > 0.0 ? normalize_angle(d.angle() - robot.heading) : 0.0;
  return g;
}

MotionFeature build_motion_feature(std::span<const Scan> history, double current_heading,
                                   GoalVector goal, const LidarConfig& config,
                                   double goal_reference) {
  if (history.empty()) throw std::invalid_argument("motion feature needs scan history");
  MotionFeature feature;
  feature.rows = static_cast<int>(history.size());
  feature.beams = config.beams;
  feature.goal = goal;
  feature.goal.bearing = normalize_angle(goal.bearing);
  feature.goal_reference = goal_reference > 0.0 ? goal_reference : 1.0;
  feature.matrix.reserve(history.size() * static_cast<std::size_t>(config.beams));
  for (const Scan& scan : history) {
    const Scan aligned = calibrate(scan, current_heading, config);
    feature.matrix.insert(feature.matrix.end(), aligned.ranges.begin(), aligned.ranges.end());
  }
  return feature;
}

void ScanHistory::reset(const Scan& first) {
  scans_.assign(static_cast<std::size_t>(length_), first);
}

void ScanHistory::push(Scan scan) {
  if (scans_.empty()) {
    reset(scan);
    return;
  }
  scans_.pop_front();
  scans_.push_back(std::move(scan));
}

}  // namespace socnav
