#pragma once
/**
 * @file config.hpp
 * @brief JSON (de)serialization of the environment configuration.
 *
 * Every key is optional and falls back to the struct default. Unknown keys
 * are rejected so a typo cannot silently fall back to a default. The schema
 * is documented in configs/README.md.
 */

#include <filesystem>

#include "json.hpp"
#include "socnav/world.hpp"

namespace socnav {

nlohmann::json to_json(const EnvConfig& config);
/// Overlays `j` on `base`; throws std::invalid_argument on unknown keys or bad values.
EnvConfig env_config_from_json(const nlohmann::json& j, EnvConfig base = {});

nlohmann::json to_json(const LidarConfig& lidar);
LidarConfig lidar_config_from_json(const nlohmann::json& j, LidarConfig base = {});

/// Throws std::runtime_error when the file is missing or not valid JSON.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Throws std::invalid_argument naming the first key of `j` not in `allowed`.
void require_known_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                        const char* where);

}  // namespace socnav
