#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "socnav/crowd.hpp"

namespace socnav {

namespace {

constexpr double kArrivalRadius = 0.2;
constexpr double kMovingSpeed = 0.05;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool bernoulli(std::mt19937_64& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng);
}

Vec2 random_point(const Area& area, std::mt19937_64& rng) {
  const double x = uniform(rng, -area.half_extent.x, area.half_extent.x);
  const double y = uniform(rng, -area.half_extent.y, area.half_extent.y);
  return area.center + Vec2(x, y);
}

int next_id(const std::vector<Pedestrian>& peds) {
  int id = 0;
  for (const auto& p : peds) id = std::max(id, p.id + 1);
  return id;
}

bool spot_is_free(Vec2 p, double radius, const std::vector<Pedestrian>& peds,
                  std::span<const Shape> obstacles, double margin) {
  for (const auto& other : peds) {
    if ((other.position - p).norm() < radius + other.radius + margin) return false;
  }
  for (const auto& shape : obstacles) {
    if (signed_distance(p, shape) < radius + margin) return false;
  }
  return true;
}

void start_moving(Pedestrian& p) {
  const Vec2 dir = (p.goal - p.position).normalized();
  p.velocity = dir * p.pref_speed;
  if (dir.norm_sq() > 0.0) p.motion_heading = dir.angle();
}

// Point on the area boundary and a goal on the far side of the area.
std::pair<Vec2, Vec2> walk_in_route(const Area& area, std::mt19937_64& rng) {
  const int side = std::uniform_int_distribution<int>(0, 3)(rng);
  const double hx = area.half_extent.x;
  const double hy = area.half_extent.y;
  const double s = uniform(rng, -1.0, 1.0);
  const double t = uniform(rng, -1.0, 1.0);
  Vec2 start;
  Vec2 goal;
  switch (side) {
    case 0: start = {-hx, s * hy}; goal = {hx, t * hy}; break;
    case 1: start = {hx, s * hy}; goal = {-hx, t * hy}; break;
    case 2: start = {s * hx, -hy}; goal = {t * hx, hy}; break;
    default: start = {s * hx, hy}; goal = {t * hx, -hy}; break;
  }
  return {area.center + start, area.center + goal};
}

}  // namespace

Shape Pedestrian::body() const {
  if (!rect_body) return Circle(position, radius);
  const double half_length = radius * std::cos(body_aspect);
  const double half_width = radius * std::sin(body_aspect);
  return OrientedRect::centered(position, motion_heading, half_length, half_width);
}

bool Area::contains(Vec2 p) const {
  const Vec2 d = p - center;
  return std::abs(d.x) <= half_extent.x && std::abs(d.y) <= half_extent.y;
}

void CrowdConfig::validate() const {
  if (count < 0) throw std::invalid_argument("crowd count must be nonnegative");
  if (!(speed_min > 0.0) || speed_max < speed_min) throw std::invalid_argument("bad speed range");
  if (!(radius_min > 0.0) || radius_max < radius_min) throw std::invalid_argument("bad radius range");
  if (!(area.half_extent.x > 0.0) || !(area.half_extent.y > 0.0)) {
    throw std::invalid_argument("crowd area must be nonempty");
  }
  for (double p : {walk_in_probability, stop_go_probability, rect_probability}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability outside [0, 1]");
  }
  if (!(stop_mean_duration > 0.0)) throw std::invalid_argument("stop duration must be positive");
}

Pedestrian sample_pedestrian(int id, Vec2 position, Vec2 goal, const CrowdConfig& config,
                             std::mt19937_64& rng) {
  Pedestrian p;
  p.id = id;
  p.position = position;
  p.goal = goal;
  p.pref_speed = uniform(rng, config.speed_min, config.speed_max);
  p.radius = uniform(rng, config.radius_min, config.radius_max);
  p.rect_body = bernoulli(rng, config.rect_probability);
  // Aspect between a thin plank and a square, measured as the corner angle.
  p.body_aspect = uniform(rng, 0.35, 0.25 * kPi);
  start_moving(p);
  return p;
}

void step_crowd(std::vector<Pedestrian>& peds, const CrowdConfig& config,
                std::span<const Shape> obstacles, double dt, std::mt19937_64& rng,
                const OrcaParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("crowd step needs dt > 0");

  // Behavior transitions happen before velocities so they use one snapshot.
  const double end_probability = std::min(1.0, dt / config.stop_mean_duration);
  for (auto& p : peds) {
    if (p.behavior.stopped) {
      if (--p.behavior.remaining_steps <= 0) p.behavior = {};
    } else if (bernoulli(rng, config.stop_go_probability)) {
      p.behavior.stopped = true;
      p.behavior.remaining_steps =
          1 + std::geometric_distribution<int>(end_probability)(rng);
    }
  }

  std::vector<Vec2> next(peds.size());
  for (std::size_t i = 0; i < peds.size(); ++i) {
    next[i] = orca_velocity(peds[i], peds, obstacles, params, dt);
  }
  for (std::size_t i = 0; i < peds.size(); ++i) {
    Pedestrian& p = peds[i];
    p.velocity = next[i];
    p.position += p.velocity * dt;
    if (p.velocity.norm() >= kMovingSpeed) p.motion_heading = p.velocity.angle();
    if ((p.goal - p.position).norm() < kArrivalRadius) p.goal = random_point(config.area, rng);
  }

  if (static_cast<int>(peds.size()) < config.population_cap() &&
      bernoulli(rng, config.walk_in_probability)) {
    const auto [start, goal] = walk_in_route(config.area, rng);
    Pedestrian p = sample_pedestrian(next_id(peds), start, goal, config, rng);
    if (spot_is_free(start, p.radius, peds, obstacles, 0.05)) peds.push_back(p);
  }
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::crossing: return "crossing";
    case ScenarioKind::towards: return "towards";
    case ScenarioKind::ahead: return "ahead";
    case ScenarioKind::random: return "random";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (auto kind : {ScenarioKind::crossing, ScenarioKind::towards, ScenarioKind::ahead,
                    ScenarioKind::random}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown scenario kind '" + std::string(name) +
                              "' (expected crossing, towards, ahead or random)");
}

std::vector<Pedestrian> spawn_scenario(ScenarioKind kind, int count, Vec2 robot_start,
                                       Vec2 robot_goal, const CrowdConfig& config,
                                       std::mt19937_64& rng) {
  if (count < 0) throw std::invalid_argument("scenario count must be nonnegative");
  const Vec2 axis = (robot_goal - robot_start).normalized();
  if (axis.norm_sq() == 0.0) throw std::invalid_argument("robot start equals goal");
  const Vec2 side = axis.perp();
  const Area& area = config.area;
  // Scenario coordinates: `a` along the robot axis, `b` across it, both
  // relative to the area center. The area is treated as square in this frame.
  const double half = std::min(area.half_extent.x, area.half_extent.y);
  const auto at = [&](double a, double b) { return area.center + axis * a + side * b; };

  std::vector<Pedestrian> peds;
  peds.reserve(static_cast<std::size_t>(count));
  for (int id = 0; id < count; ++id) {
    Pedestrian p;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      Vec2 pos;
      Vec2 goal;
      double speed_scale = 1.0;
      switch (kind) {
        case ScenarioKind::crossing: {
          const double sign = bernoulli(rng, 0.5) ? 1.0 : -1.0;
          const double a = uniform(rng, -0.8 * half, 0.8 * half);
          pos = at(a, sign * uniform(rng, 0.2 * half, 0.95 * half));
          goal = at(a + uniform(rng, -0.2, 0.2) * half, -sign * half);
          break;
        }
        case ScenarioKind::towards: {
          pos = at(uniform(rng, -0.1 * half, 0.95 * half), uniform(rng, -0.9, 0.9) * half);
          goal = robot_start + side * (uniform(rng, -0.5, 0.5) * half);
          break;
        }
        case ScenarioKind::ahead: {
          const double b = uniform(rng, -0.9, 0.9) * half;
          pos = at(uniform(rng, -0.5 * half, 0.95 * half), b);
          goal = at(half + 2.0 * half, b);
          speed_scale = 0.5;
          break;
        }
        case ScenarioKind::random: {
          pos = random_point(area, rng);
          goal = random_point(area, rng);
          break;
        }
      }
      p = sample_pedestrian(id, pos, goal, config, rng);
      p.pref_speed *= speed_scale;
      start_moving(p);
      placed = (p.position - robot_start).norm() > p.radius + 0.8 &&
               spot_is_free(p.position, p.radius, peds, {}, 0.1);
    }
    if (!placed) throw std::runtime_error("could not place scenario pedestrians without overlap");
    peds.push_back(p);
  }
  return peds;
}

std::vector<Pedestrian> spawn_random_crowd(const CrowdConfig& config,
                                           std::span<const Shape> obstacles,
                                           std::span<const Vec2> keep_clear,
                                           std::mt19937_64& rng) {
  std::vector<Pedestrian> peds;
  for (int id = 0; id < config.count; ++id) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Pedestrian p = sample_pedestrian(id, random_point(config.area, rng),
                                       random_point(config.area, rng), config, rng);
      bool clear = spot_is_free(p.position, p.radius, peds, obstacles, 0.1);
      for (Vec2 k : keep_clear) clear = clear && (p.position - k).norm() > p.radius + 1.0;
      if (clear) {
        peds.push_back(p);
        break;
      }
    }
  }
  return peds;
}

}  // namespace socnav
