#include "socnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "socnav/seeding.hpp"

namespace socnav {

Action Action::clamped() const {
  return {std::clamp(ax, -kActionLimit, kActionLimit), std::clamp(ay, -kActionLimit, kActionLimit)};
}

Twist action_to_twist(Action a) {
  const Action c = a.clamped();
  return {std::min(std::hypot(c.ax, c.ay), kActionLimit), std::atan2(c.ay, c.ax)};
}

RobotState integrate(const RobotState& robot, Twist twist, double dt) {
  RobotState out = robot;
  const double v = twist.linear;
  const double w = twist.angular;
  const double theta = robot.pose.heading;
  if (std::abs(w) > 1e-6) {
    const double theta_next = theta + w * dt;
    out.pose.position.x += v / w * (std::sin(theta_next) - std::sin(theta));
    out.pose.position.y -= v / w * (std::cos(theta_next) - std::cos(theta));
  } else {
    const double mid = theta + 0.5 * w * dt;
    out.pose.position += Vec2::from_angle(mid) * (v * dt);
  }
  out.pose.heading = normalize_angle(theta + w * dt);
  out.twist = twist;
  return out;
}

double heading_control(double heading, double target_heading, const ControllerParams& params) {
  const double error = normalize_angle(target_heading - heading);
  return std::clamp(params.heading_gain * error, -params.max_turn_rate, params.max_turn_rate);
}

void MapConfig::validate() const {
  if (count_min < 0 || count_max < count_min) throw std::invalid_argument("bad obstacle count range");
  if (!(size_min > 0.0) || size_max < size_min) throw std::invalid_argument("bad obstacle size range");
  if (!(arena.half_extent.x > 0.0) || !(arena.half_extent.y > 0.0)) {
    throw std::invalid_argument("arena must be nonempty");
  }
  if (!(corridor_resolution > 0.0)) throw std::invalid_argument("corridor resolution must be positive");
  if (max_attempts < 1) throw std::invalid_argument("map attempts must be positive");
}

std::vector<Shape> arena_walls(const Arena& arena) {
  const Vec2 c = arena.center;
  const double hx = arena.half_extent.x;
  const double hy = arena.half_extent.y;
  const Vec2 a = c + Vec2(-hx, -hy);
  const Vec2 b = c + Vec2(hx, -hy);
  const Vec2 d = c + Vec2(hx, hy);
  const Vec2 e = c + Vec2(-hx, hy);
  return {Segment(a, b), Segment(b, d), Segment(d, e), Segment(e, a)};
}

bool corridor_exists(std::span<const Shape> shapes, Vec2 start, Vec2 goal, const Arena& arena,
                     double clearance, double resolution) {
  const int nx = static_cast<int>(std::floor(arena.half_extent.x / resolution));
  const int ny = static_cast<int>(std::floor(arena.half_extent.y / resolution));
  const int w = 2 * nx + 1;
  const int h = 2 * ny + 1;
  const auto center_of = [&](int i, int j) {
    return arena.center + Vec2((i - nx) * resolution, (j - ny) * resolution);
  };
  const auto cell_of = [&](Vec2 p) {
    const Vec2 d = (p - arena.center) / resolution;
    return std::pair<int, int>{static_cast<int>(std::lround(d.x)) + nx,
                               static_cast<int>(std::lround(d.y)) + ny};
  };
  const auto free = [&](int i, int j) {
    const Vec2 p = center_of(i, j);
    for (const Shape& s : shapes) {
      if (signed_distance(p, s) <= clearance) return false;
    }
    return true;
  };
  const auto [si, sj] = cell_of(start);
  const auto [gi, gj] = cell_of(goal);
  const auto inside = [&](int i, int j) { return i >= 0 && j >= 0 && i < w && j < h; };
  if (!inside(si, sj) || !inside(gi, gj)) return false;

  // 0 = unknown, 1 = free, 2 = blocked, 3 = visited
  std::vector<std::uint8_t> state(static_cast<std::size_t>(w) * h, 0);
  const auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * w + i; };
  const auto open = [&](int i, int j) {
    auto& s = state[idx(i, j)];
    if (s == 0) s = free(i, j) ? 1 : 2;
    return s == 1;
  };
  if (!open(si, sj) || !open(gi, gj)) return false;
  std::queue<std::pair<int, int>> frontier;
  frontier.emplace(si, sj);
  state[idx(si, sj)] = 3;
  constexpr int kDi[4] = {1, -1, 0, 0};
  constexpr int kDj[4] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    const auto [i, j] = frontier.front();
    frontier.pop();
    if (i == gi && j == gj) return true;
    for (int k = 0; k < 4; ++k) {
      const int a = i + kDi[k];
      const int b = j + kDj[k];
      if (!inside(a, b) || !open(a, b)) continue;
      state[idx(a, b)] = 3;
      frontier.emplace(a, b);
    }
  }
  return false;
}

std::vector<Shape> randomize_map(std::uint64_t seed, const MapConfig& config, Vec2 start,
                                 Vec2 goal, double robot_radius) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const Arena& arena = config.arena;

  std::vector<Shape> walls;
  if (config.walls) walls = arena_walls(arena);

  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    std::vector<Shape> shapes = walls;
    const int count = std::uniform_int_distribution<int>(config.count_min, config.count_max)(rng);
    for (int k = 0; k < count; ++k) {
      // Rejection-sample a pose that keeps the start and goal discs clear.
      for (int tries = 0; tries < 100; ++tries) {
        const double size = in(config.size_min, config.size_max);
        const Vec2 center = arena.center + Vec2(in(-1.0, 1.0) * (arena.half_extent.x - size),
                                                in(-1.0, 1.0) * (arena.half_extent.y - size));
        std::optional<Shape> candidate;
        if (unit(rng) < config.rect_probability) {
          const double heading = in(-kPi, kPi);
          candidate = OrientedRect::centered(center, heading, size, size * in(0.3, 1.0));
        } else {
          candidate = Circle(center, size);
        }
        if (signed_distance(start, *candidate) < config.keep_clear ||
            signed_distance(goal, *candidate) < config.keep_clear) {
          continue;
        }
        shapes.push_back(*candidate);
        break;
      }
    }
    if (corridor_exists(shapes, start, goal, arena, robot_radius + config.corridor_margin,
                        config.corridor_resolution)) {
      return shapes;
    }
  }
  throw std::runtime_error("obstacle configuration too dense: no start-goal corridor after " +
                           std::to_string(config.max_attempts) + " attempts");
}

void EnvConfig::validate() const {
  map.validate();
  crowd.validate();
  lidar.validate();
  if (rates.scan_hz <= 0 || rates.control_hz <= 0 || rates.policy_hz <= 0) {
    throw std::invalid_argument("rates must be positive");
  }
  if (rates.scan_hz % rates.policy_hz != 0 || rates.scan_hz % rates.control_hz != 0) {
    throw std::invalid_argument("scan rate must be a multiple of control and policy rates");
  }
  if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
  if (!(goal_tolerance > 0.0)) throw std::invalid_argument("goal tolerance must be positive");
  if (!(robot_radius > 0.0)) throw std::invalid_argument("robot radius must be positive");
  if (start == goal) throw std::invalid_argument("start and goal coincide");
  checked(start);
  checked(goal);
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::running: return "running";
    case Outcome::reached: return "reached";
    case Outcome::collided: return "collided";
    case Outcome::timeout: return "timeout";
  }
  return "unknown";
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<Shape> Environment::world_shapes() const {
  std::vector<Shape> shapes = obstacles_;
  shapes.reserve(shapes.size() + peds_.size());
  for (const auto& p : peds_) shapes.push_back(p.body());
  return shapes;
}

double Environment::robot_clearance() const {
  const Circle body(robot_.pose.position, robot_.radius);
  double best = std::numeric_limits<double>::infinity();
  if (!obstacles_.empty()) best = closest_distance(body, obstacles_);
  for (const auto& p : peds_) best = std::min(best, surface_distance(body, p.body()));
  return best;
}

void Environment::capture_scan() {
  const auto shapes = world_shapes();
  step_scans_.push_back(simulate_scan(shapes, robot_.pose, config_.lidar, ticks_,
                                     config_.lidar.noise_sigma > 0.0 ? &noise_rng_ : nullptr));
  history_.push(step_scans_.back());
}

MotionFeature Environment::reset() {
  robot_ = {};
  robot_.pose = {config_.start, normalize_angle(config_.start_heading)};
  robot_.radius = config_.robot_radius;
  obstacles_ = randomize_map(config_.map_seed, config_.map, config_.start, config_.goal,
                             config_.robot_radius);
  crowd_rng_.seed(config_.crowd.seed);
  noise_rng_.seed(derive_seed(config_.map_seed, "lidar-noise"));
  if (config_.scenario) {
    peds_ = spawn_scenario(*config_.scenario, config_.crowd.count, config_.start, config_.goal,
                           config_.crowd, crowd_rng_);
  } else {
    const Vec2 keep[2] = {config_.start, config_.goal};
    peds_ = spawn_random_crowd(config_.crowd, obstacles_, keep, crowd_rng_);
  }
  ticks_ = 0;
  steps_ = 0;
  outcome_ = Outcome::running;
  started_ = true;
  history_ = ScanHistory(kHistoryLength);
  step_scans_.clear();
  capture_scan();
  return observe();
}

MotionFeature Environment::observe() const {
  const auto snapshot = history_.snapshot();
  return build_motion_feature(snapshot, robot_.pose.heading, goal_vector(), config_.lidar,
                              (config_.goal - config_.start).norm());
}

StepOutcome Environment::step(const Command& command) {
  if (!started_) throw std::logic_error("step called before reset");
  if (outcome_ != Outcome::running) throw std::logic_error("step called on a finished episode");

  const ControllerParams& ctl = config_.controller;
  double linear = 0.0;
  std::optional<double> target_heading;
  double direct_turn = 0.0;
  if (const auto* action = std::get_if<Action>(&command)) {
    const Twist t = action_to_twist(*action);
    linear = std::min(t.linear, ctl.max_speed);
    target_heading = normalize_angle(robot_.pose.heading + t.angular);
  } else {
    const Twist& t = std::get<Twist>(command);
    linear = std::clamp(t.linear, 0.0, ctl.max_speed);
    direct_turn = std::clamp(t.angular, -ctl.max_turn_rate, ctl.max_turn_rate);
  }

  step_scans_.clear();
  const double dt = 1.0 / config_.rates.scan_hz;
  const int per_control = config_.rates.ticks_per_control();
  double turn = 0.0;
  Outcome result = Outcome::running;
  for (int tick = 0; tick < config_.rates.ticks_per_policy(); ++tick) {
    if (tick % per_control == 0) {
      turn = target_heading ? heading_control(robot_.pose.heading, *target_heading, ctl)
                            : direct_turn;
    }
    robot_ = integrate(robot_, {linear, turn}, dt);
    step_crowd(peds_, config_.crowd, obstacles_, dt, crowd_rng_, config_.orca);
    ++ticks_;
    capture_scan();
    if (robot_clearance() <= 0.0) {
      result = Outcome::collided;
      break;
    }
    if ((robot_.pose.position - config_.goal).norm() < config_.goal_tolerance) {
      result = Outcome::reached;
      break;
    }
  }
  ++steps_;
  if (result == Outcome::running && steps_ >= config_.max_steps) result = Outcome::timeout;
  outcome_ = result;

  const RobotSnapshot snap{Circle(robot_.pose.position, robot_.radius), robot_.pose.heading,
                           linear};
  const SafetyAssessment a =
      assess(snap, peds_, obstacles_, config_.goal, config_.start, result == Outcome::reached,
             config_.include_social_reward, config_.rewards);

  StepOutcome out;
  out.observation = observe();
  out.parts = {a.ego, a.social, a.goal};
  out.reward = out.parts.total();
  out.done = result;
  out.info.closest = a.closest;
  out.info.ego_violation = a.ego_violation;
  out.info.social_violations = a.violations;
  out.info.considered = a.considered;
  out.info.sim_time = sim_time();
  out.info.steps = steps_;
  return out;
}

}  // namespace socnav
