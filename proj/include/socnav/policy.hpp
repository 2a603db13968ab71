#pragma once
/**
 * @file policy.hpp
 * @brief Policy interface plus the convolutional actor and critic networks.
 *
 * The motion feature is treated as a one-channel image with time on the row
 * axis and beam index on the column axis. Convolutions use wide kernels and
 * strides across beams and narrow ones across time, followed by max pooling
 * across beams, so the trunk responds to coarse obstacle geometry rather
 * than exact object outlines.
 */

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "socnav/lidar.hpp"
#include "socnav/nn.hpp"
#include "socnav/world.hpp"

namespace socnav {

/// Everything a policy may look at for one decision.
struct Observation {
  const MotionFeature& feature;
  const Scan& scan;  ///< newest raw scan
  const RobotState& robot;
  /// Full pedestrian state. Only external full-state policies may use it.
  std::span<const Pedestrian> pedestrians;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Command act(const Observation& obs) = 0;
  virtual void reset() {}
  /// Independent copy for another episode runner.
  virtual std::unique_ptr<Policy> clone() const = 0;
};

struct ConvSpec {
  int kernel_rows = 3;
  int kernel_beams = 41;
  int stride_rows = 1;
  int stride_beams = 8;
  int channels = 16;
  int pool_rows = 1;   ///< max-pool window after this conv; 1x1 disables it
  int pool_beams = 1;
};

struct NetworkSpec {
  int rows = kHistoryLength;
  int beams = 1080;
  std::vector<ConvSpec> convs;
  std::vector<int> hidden;
  double action_limit = kActionLimit;
  double range_scale = 10.0;     ///< ranges are divided by this
  double goal_distance_cap = 3.0;  ///< normalized goal distance is clipped here

  /// Full-size layout for 1080-beam scans.
  static NetworkSpec standard(int beams = 1080);
  /// Smaller layout sized for 180-beam desk experiments.
  static NetworkSpec desk(int beams = 180);

  void validate() const;
  nlohmann::json to_json() const;
  static NetworkSpec from_json(const nlohmann::json& j);
};

/// Network input for one feature: column 0 holds the scan image, goal is 2x1.
struct EncodedObservation {
  nn::Vector image;
  Eigen::Vector2d goal;
};

EncodedObservation encode(const MotionFeature& feature, const NetworkSpec& spec);
/// Goal part of encode(): (distance / reference, capped) and bearing / pi.
Eigen::Vector2d encode_goal(const GoalVector& goal, double reference, const NetworkSpec& spec);

class ActorNet {
 public:
  /// Random init from rng; final layer uses small weights.
  ActorNet(const NetworkSpec& spec, std::mt19937_64& rng);

  /// Returns 2 x batch actions in [-limit, limit].
  nn::Matrix forward(const nn::Matrix& images, const nn::Matrix& goals);
  /// Accumulates parameter gradients for d(loss)/d(action).
  void backward(const nn::Matrix& grad_action);

  Action act(const MotionFeature& feature);

  std::vector<nn::Parameter*> parameters();
  const NetworkSpec& spec() const { return spec_; }

 private:
  NetworkSpec spec_;
  nn::Sequential trunk_;
  nn::Sequential head_;
  int trunk_features_ = 0;
};

class CriticNet {
 public:
  CriticNet(const NetworkSpec& spec, std::mt19937_64& rng);

  /// Returns 1 x batch Q-values.
  nn::Matrix forward(const nn::Matrix& images, const nn::Matrix& goals, const nn::Matrix& actions);
  /// Accumulates parameter gradients; returns d(loss)/d(action), 2 x batch.
  nn::Matrix backward(const nn::Matrix& grad_q);
  /// d(loss)/d(action) through the dense head only; trunk gradients are skipped.
  nn::Matrix action_gradient(const nn::Matrix& grad_q);

  std::vector<nn::Parameter*> parameters();
  const NetworkSpec& spec() const { return spec_; }

 private:
  NetworkSpec spec_;
  nn::Sequential trunk_;
  nn::Sequential head_;
  int trunk_features_ = 0;
};

/// Greedy evaluation wrapper around a trained actor.
class ActorPolicy final : public Policy {
 public:
  ActorPolicy(ActorNet actor, std::string name) : actor_(std::move(actor)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  Command act(const Observation& obs) override { return actor_.act(obs.feature); }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ActorPolicy>(*this); }

 private:
  ActorNet actor_;
  std::string name_;
};

}  // namespace socnav
