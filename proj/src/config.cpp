#include "socnav/config.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace socnav {

namespace {

using nlohmann::json;

json vec(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 read_vec(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument(std::string(key) + " must be a two-element array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

void read_vec(const json& j, const char* key, Vec2& out) {
  if (auto it = j.find(key); it != j.end()) out = read_vec(*it, key);
}

json to_json(const Area& a) { return {{"center", vec(a.center)}, {"half_extent", vec(a.half_extent)}}; }

json to_json(const MapConfig& m) {
  return {{"count_min", m.count_min},
          {"count_max", m.count_max},
          {"size_min", m.size_min},
          {"size_max", m.size_max},
          {"rect_probability", m.rect_probability},
          {"keep_clear", m.keep_clear},
          {"walls", m.walls},
          {"arena", {{"center", vec(m.arena.center)}, {"half_extent", vec(m.arena.half_extent)}}},
          {"corridor_resolution", m.corridor_resolution},
          {"corridor_margin", m.corridor_margin},
          {"max_attempts", m.max_attempts}};
}

MapConfig map_from_json(const json& j, MapConfig m) {
  require_known_keys(j,
                     {"count_min", "count_max", "size_min", "size_max", "rect_probability",
                      "keep_clear", "walls", "arena", "corridor_resolution", "corridor_margin",
                      "max_attempts"},
                     "map");
  read(j, "count_min", m.count_min);
  read(j, "count_max", m.count_max);
  read(j, "size_min", m.size_min);
  read(j, "size_max", m.size_max);
  read(j, "rect_probability", m.rect_probability);
  read(j, "keep_clear", m.keep_clear);
  read(j, "walls", m.walls);
  if (auto it = j.find("arena"); it != j.end()) {
    require_known_keys(*it, {"center", "half_extent"}, "map.arena");
    read_vec(*it, "center", m.arena.center);
    read_vec(*it, "half_extent", m.arena.half_extent);
  }
  read(j, "corridor_resolution", m.corridor_resolution);
  read(j, "corridor_margin", m.corridor_margin);
  read(j, "max_attempts", m.max_attempts);
  return m;
}

json to_json(const CrowdConfig& c) {
  return {{"count", c.count},
          {"area", to_json(c.area)},
          {"walk_in_probability", c.walk_in_probability},
          {"stop_go_probability", c.stop_go_probability},
          {"stop_mean_duration", c.stop_mean_duration},
          {"speed_min", c.speed_min},
          {"speed_max", c.speed_max},
          {"radius_min", c.radius_min},
          {"radius_max", c.radius_max},
          {"rect_probability", c.rect_probability},
          {"max_count", c.max_count},
          {"seed", c.seed}};
}

CrowdConfig crowd_from_json(const json& j, CrowdConfig c) {
  require_known_keys(j,
                     {"count", "area", "walk_in_probability", "stop_go_probability",
                      "stop_mean_duration", "speed_min", "speed_max", "radius_min", "radius_max",
                      "rect_probability", "max_count", "seed"},
                     "crowd");
  read(j, "count", c.count);
  if (auto it = j.find("area"); it != j.end()) {
    require_known_keys(*it, {"center", "half_extent"}, "crowd.area");
    read_vec(*it, "center", c.area.center);
    read_vec(*it, "half_extent", c.area.half_extent);
  }
  read(j, "walk_in_probability", c.walk_in_probability);
  read(j, "stop_go_probability", c.stop_go_probability);
  read(j, "stop_mean_duration", c.stop_mean_duration);
  read(j, "speed_min", c.speed_min);
  read(j, "speed_max", c.speed_max);
  read(j, "radius_min", c.radius_min);
  read(j, "radius_max", c.radius_max);
  read(j, "rect_probability", c.rect_probability);
  read(j, "max_count", c.max_count);
  read(j, "seed", c.seed);
  return c;
}

json to_json(const RewardParams& r) {
  return {{"collision_penalty", r.collision_penalty},
          {"ego_margin", r.ego_margin},
          {"ego_scale", r.ego_scale},
          {"social_scale", r.social_scale},
          {"social_horizon", r.social_horizon},
          {"social_min_distance", r.social_min_distance},
          {"social_radius", r.social_radius},
          {"stationary_speed", r.stationary_speed},
          {"goal_bonus", r.goal_bonus},
          {"progress_scale", r.progress_scale}};
}

RewardParams rewards_from_json(const json& j, RewardParams r) {
  require_known_keys(j,
                     {"collision_penalty", "ego_margin", "ego_scale", "social_scale",
                      "social_horizon", "social_min_distance", "social_radius",
                      "stationary_speed", "goal_bonus", "progress_scale"},
                     "rewards");
  read(j, "collision_penalty", r.collision_penalty);
  read(j, "ego_margin", r.ego_margin);
  read(j, "ego_scale", r.ego_scale);
  read(j, "social_scale", r.social_scale);
  read(j, "social_horizon", r.social_horizon);
  read(j, "social_min_distance", r.social_min_distance);
  read(j, "social_radius", r.social_radius);
  read(j, "stationary_speed", r.stationary_speed);
  read(j, "goal_bonus", r.goal_bonus);
  read(j, "progress_scale", r.progress_scale);
  return r;
}

json to_json(const OrcaParams& o) {
  return {{"time_horizon", o.time_horizon},
          {"time_horizon_obstacles", o.time_horizon_obstacles},
          {"neighbor_distance", o.neighbor_distance},
          {"max_neighbors", o.max_neighbors},
          {"goal_tolerance", o.goal_tolerance}};
}

OrcaParams orca_from_json(const json& j, OrcaParams o) {
  require_known_keys(j,
                     {"time_horizon", "time_horizon_obstacles", "neighbor_distance",
                      "max_neighbors", "goal_tolerance"},
                     "orca");
  read(j, "time_horizon", o.time_horizon);
  read(j, "time_horizon_obstacles", o.time_horizon_obstacles);
  read(j, "neighbor_distance", o.neighbor_distance);
  read(j, "max_neighbors", o.max_neighbors);
  read(j, "goal_tolerance", o.goal_tolerance);
  return o;
}

}  // namespace

void require_known_keys(const json& j, std::initializer_list<const char*> allowed,
                        const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw std::invalid_argument("unknown key '" + key + "' in " + where);
  }
}

json to_json(const LidarConfig& l) {
  return {{"beams", l.beams},
          {"fov", l.fov},
          {"range_min", l.range_min},
          {"range_max", l.range_max},
          {"noise_sigma", l.noise_sigma}};
}

LidarConfig lidar_config_from_json(const json& j, LidarConfig l) {
  require_known_keys(j, {"beams", "fov", "range_min", "range_max", "noise_sigma"}, "lidar");
  read(j, "beams", l.beams);
  read(j, "fov", l.fov);
  read(j, "range_min", l.range_min);
  read(j, "range_max", l.range_max);
  read(j, "noise_sigma", l.noise_sigma);
  return l;
}

json to_json(const EnvConfig& c) {
  json j = {{"map_seed", c.map_seed},
            {"map", to_json(c.map)},
            {"crowd", to_json(c.crowd)},
            {"scenario", c.scenario ? json(std::string(to_string(*c.scenario))) : json(nullptr)},
            {"start", vec(c.start)},
            {"start_heading", c.start_heading},
            {"goal", vec(c.goal)},
            {"max_steps", c.max_steps},
            {"goal_tolerance", c.goal_tolerance},
            {"rates",
             {{"scan_hz", c.rates.scan_hz},
              {"control_hz", c.rates.control_hz},
              {"policy_hz", c.rates.policy_hz}}},
            {"lidar", to_json(c.lidar)},
            {"robot_radius", c.robot_radius},
            {"controller",
             {{"heading_gain", c.controller.heading_gain},
              {"max_turn_rate", c.controller.max_turn_rate},
              {"max_speed", c.controller.max_speed}}},
            {"rewards", to_json(c.rewards)},
            {"orca", to_json(c.orca)},
            {"include_social_reward", c.include_social_reward}};
  return j;
}

EnvConfig env_config_from_json(const json& j, EnvConfig c) {
  try {
    require_known_keys(j,
                       {"map_seed", "map", "crowd", "scenario", "start", "start_heading", "goal",
                        "max_steps", "goal_tolerance", "rates", "lidar", "robot_radius",
                        "controller", "rewards", "orca", "include_social_reward"},
                       "environment");
    read(j, "map_seed", c.map_seed);
    if (auto it = j.find("map"); it != j.end()) c.map = map_from_json(*it, c.map);
    if (auto it = j.find("crowd"); it != j.end()) c.crowd = crowd_from_json(*it, c.crowd);
    if (auto it = j.find("scenario"); it != j.end()) {
      if (it->is_null()) {
        c.scenario.reset();
      } else {
        c.scenario = parse_scenario_kind(it->get<std::string>());
      }
    }
    read_vec(j, "start", c.start);
    read(j, "start_heading", c.start_heading);
    read_vec(j, "goal", c.goal);
    read(j, "max_steps", c.max_steps);
    read(j, "goal_tolerance", c.goal_tolerance);
    if (auto it = j.find("rates"); it != j.end()) {
      require_known_keys(*it, {"scan_hz", "control_hz", "policy_hz"}, "rates");
      read(*it, "scan_hz", c.rates.scan_hz);
      read(*it, "control_hz", c.rates.control_hz);
      read(*it, "policy_hz", c.rates.policy_hz);
    }
    if (auto it = j.find("lidar"); it != j.end()) c.lidar = lidar_config_from_json(*it, c.lidar);
    read(j, "robot_radius", c.robot_radius);
    if (auto it = j.find("controller"); it != j.end()) {
      require_known_keys(*it, {"heading_gain", "max_turn_rate", "max_speed"}, "controller");
      read(*it, "heading_gain", c.controller.heading_gain);
      read(*it, "max_turn_rate", c.controller.max_turn_rate);
      read(*it, "max_speed", c.controller.max_speed);
    }
    if (auto it = j.find("rewards"); it != j.end()) c.rewards = rewards_from_json(*it, c.rewards);
    if (auto it = j.find("orca"); it != j.end()) c.orca = orca_from_json(*it, c.orca);
    read(j, "include_social_reward", c.include_social_reward);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad environment config: ") + e.what());
  }
  c.validate();
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace socnav
