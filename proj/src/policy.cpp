#include "socnav/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace socnav {

namespace {

// Builds conv/relu/pool stages; returns the flattened feature count.
int build_trunk(nn::Sequential& trunk, const NetworkSpec& spec, const std::string& prefix) {
  nn::TensorShape shape{1, spec.rows, spec.beams};
  for (std::size_t i = 0; i < spec.convs.size(); ++i) {
    const ConvSpec& c = spec.convs[i];
    auto& conv = trunk.add<nn::Conv2D>(shape, c.channels, c.kernel_rows, c.kernel_beams,
                                       c.stride_rows, c.stride_beams,
                                       prefix + ".conv" + std::to_string(i));
    shape = conv.output_shape();
    // Nothing consumes the gradient with respect to the scan image.
    if (i == 0) conv.set_input_gradient(false);
    trunk.add<nn::ReLU>(shape);
    if (c.pool_rows > 1 || c.pool_beams > 1) {
      shape = trunk.add<nn::MaxPool2D>(shape, c.pool_rows, c.pool_beams).output_shape();
    }
  }
  return shape.size();
}

void build_head(nn::Sequential& head, int inputs, const std::vector<int>& hidden, int outputs,
                const std::string& prefix) {
  int width = inputs;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    head.add<nn::Dense>(width, hidden[i], prefix + ".fc" + std::to_string(i));
    head.add<nn::ReLU>(nn::TensorShape{hidden[i], 1, 1});
    width = hidden[i];
  }
  head.add<nn::Dense>(width, outputs, prefix + ".out");
}

void initialize(std::vector<nn::Parameter*> params, std::mt19937_64& rng) {
  // Parameters come in (weight, bias) pairs; the last pair is the output layer.
  for (std::size_t i = 0; i + 1 < params.size(); i += 2) {
    nn::Parameter& w = *params[i];
    const bool last = i + 2 >= params.size();
    if (last) {
      std::uniform_real_distribution<double> small(-3e-3, 3e-3);
      for (Eigen::Index k = 0; k < w.value.size(); ++k) w.value.data()[k] = small(rng);
    } else {
      nn::init_uniform(w, static_cast<int>(w.value.cols()), rng);
    }
    params[i + 1]->value.setZero();
  }
}

nn::Matrix stack_rows(const nn::Matrix& a, const nn::Matrix& b) {
  nn::Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

void require_batch(const nn::Matrix& images, const nn::Matrix& goals, const NetworkSpec& spec) {
  if (images.rows() != static_cast<Eigen::Index>(spec.rows) * spec.beams) {
    throw std::invalid_argument("observation shape mismatch: network expects " +
                                std::to_string(spec.rows) + "x" + std::to_string(spec.beams));
  }
  if (goals.rows() != 2 || goals.cols() != images.cols()) {
    throw std::invalid_argument("goal batch shape mismatch");
  }
}

}  // namespace

NetworkSpec NetworkSpec::standard(int beams) {
  NetworkSpec s;
  s.beams = beams;
  s.convs = {{3, 41, 1, 8, 16, 1, 4}, {3, 5, 1, 2, 32, 1, 1}};
  s.hidden = {256, 128};
  return s;
}

NetworkSpec NetworkSpec::desk(int beams) {
  NetworkSpec s;
  s.beams = beams;
  const int scale = std::max(1, beams / 180);
  s.convs = {{4, 12 * scale, 4, 12 * scale, 8, 1, 2}, {2, 3, 2, 1, 16, 1, 1}};
  s.hidden = {128, 64};
  return s;
}

void NetworkSpec::validate() const {
  if (rows < 1 || beams < 2) throw std::invalid_argument("network input shape invalid");
  if (!(action_limit > 0.0) || !(range_scale > 0.0)) {
    throw std::invalid_argument("network scales must be positive");
  }
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden width must be positive");
  }
  nn::Sequential probe;
  build_trunk(probe, *this, "probe");  // throws on a kernel that does not fit
}

nlohmann::json NetworkSpec::to_json() const {
  nlohmann::json convs_json = nlohmann::json::array();
  for (const ConvSpec& c : convs) {
    convs_json.push_back({{"kernel", {c.kernel_rows, c.kernel_beams}},
                          {"stride", {c.stride_rows, c.stride_beams}},
                          {"channels", c.channels},
                          {"pool", {c.pool_rows, c.pool_beams}}});
  }
  return {{"rows", rows},
          {"beams", beams},
          {"convs", convs_json},
          {"hidden", hidden},
          {"action_limit", action_limit},
          {"range_scale", range_scale},
          {"goal_distance_cap", goal_distance_cap}};
}

NetworkSpec NetworkSpec::from_json(const nlohmann::json& j) {
  NetworkSpec s;
  s.rows = j.at("rows").get<int>();
  s.beams = j.at("beams").get<int>();
  for (const auto& c : j.at("convs")) {
    ConvSpec conv;
    conv.kernel_rows = c.at("kernel").at(0).get<int>();
    conv.kernel_beams = c.at("kernel").at(1).get<int>();
    conv.stride_rows = c.at("stride").at(0).get<int>();
    conv.stride_beams = c.at("stride").at(1).get<int>();
    conv.channels = c.at("channels").get<int>();
    conv.pool_rows = c.value("pool", nlohmann::json::array({1, 1})).at(0).get<int>();
    conv.pool_beams = c.value("pool", nlohmann::json::array({1, 1})).at(1).get<int>();
    s.convs.push_back(conv);
  }
  s.hidden = j.at("hidden").get<std::vector<int>>();
  s.action_limit = j.value("action_limit", kActionLimit);
  s.range_scale = j.value("range_scale", 10.0);
  s.goal_distance_cap = j.value("goal_distance_cap", 3.0);
  return s;
}

EncodedObservation encode(const MotionFeature& feature, const NetworkSpec& spec) {
  if (feature.rows != spec.rows || feature.beams != spec.beams) {
    throw std::invalid_argument("motion feature is " + std::to_string(feature.rows) + "x" +
                                std::to_string(feature.beams) + ", network expects " +
                                std::to_string(spec.rows) + "x" + std::to_string(spec.beams));
  }
  EncodedObservation e;
  e.image = Eigen::Map<const nn::Vector>(feature.matrix.data(),
                                         static_cast<Eigen::Index>(feature.matrix.size())) /
            spec.range_scale;
  e.goal = encode_goal(feature.goal, feature.goal_reference, spec);
  return e;
}

Eigen::Vector2d encode_goal(const GoalVector& goal, double reference, const NetworkSpec& spec) {
  const double scale = reference > 0.0 ? reference : 1.0;
  return {std::min(goal.distance / scale, spec.goal_distance_cap), goal.bearing / kPi};
}

ActorNet::ActorNet(const NetworkSpec& spec, std::mt19937_64& rng) : spec_(spec) {
  spec_.validate();
  trunk_features_ = build_trunk(trunk_, spec_, "actor");
  build_head(head_, trunk_features_ + 2, spec_.hidden, 2, "actor");
  head_.add<nn::ScaledTanh>(nn::TensorShape{2, 1, 1}, spec_.action_limit);
  initialize(parameters(), rng);
}

nn::Matrix ActorNet::forward(const nn::Matrix& images, const nn::Matrix& goals) {
  require_batch(images, goals, spec_);
  return head_.forward(stack_rows(trunk_.forward(images), goals));
}

void ActorNet::backward(const nn::Matrix& grad_action) {
  const nn::Matrix g = head_.backward(grad_action);
  trunk_.backward(g.topRows(trunk_features_));
}

Action ActorNet::act(const MotionFeature& feature) {
  const EncodedObservation e = encode(feature, spec_);
  const nn::Matrix out = forward(e.image, e.goal);
  return Action{out(0, 0), out(1, 0)}.clamped();
}

std::vector<nn::Parameter*> ActorNet::parameters() {
  auto params = trunk_.parameters();
  for (auto* p : head_.parameters()) params.push_back(p);
  return params;
}

CriticNet::CriticNet(const NetworkSpec& spec, std::mt19937_64& rng) : spec_(spec) {
  spec_.validate();
  trunk_features_ = build_trunk(trunk_, spec_, "critic");
  build_head(head_, trunk_features_ + 4, spec_.hidden, 1, "critic");
  initialize(parameters(), rng);
}

nn::Matrix CriticNet::forward(const nn::Matrix& images, const nn::Matrix& goals,
                              const nn::Matrix& actions) {
  require_batch(images, goals, spec_);
  if (actions.rows() != 2 || actions.cols() != images.cols()) {
    throw std::invalid_argument("action batch shape mismatch");
  }
  return head_.forward(stack_rows(stack_rows(trunk_.forward(images), goals), actions));
}

nn::Matrix CriticNet::backward(const nn::Matrix& grad_q) {
  const nn::Matrix g = head_.backward(grad_q);
  trunk_.backward(g.topRows(trunk_features_));
  return g.bottomRows(2);
}

nn::Matrix CriticNet::action_gradient(const nn::Matrix& grad_q) {
  return head_.backward(grad_q).bottomRows(2);
}

std::vector<nn::Parameter*> CriticNet::parameters() {
  auto params = trunk_.parameters();
  for (auto* p : head_.parameters()) params.push_back(p);
  return params;
}

}  // namespace socnav
