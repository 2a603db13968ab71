#pragma once
/**
 * @file eval.hpp
 * @brief Scenario suites, episode logs, metrics and file export.
 *
 * Suite names:
 *   mapless                      fixed start and goal, random static maps, no crowd
 *   crowd-<kind>-<count>         open arena with a scripted crowd
 *   combined-<kind>-<count>      random static map plus a scripted crowd
 * where <kind> is crossing, towards, ahead or random.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "socnav/policy.hpp"
#include "socnav/world.hpp"

namespace socnav {

enum class SuiteKind { mapless, crowd, combined };

struct SuiteSpec {
  SuiteKind kind = SuiteKind::mapless;
  ScenarioKind scenario = ScenarioKind::crossing;
  int pedestrians = 0;

  std::string name() const;
};

/// Throws std::invalid_argument listing the valid suite names.
SuiteSpec parse_suite(const std::string& name);
std::string valid_suites_help();

/// Suite-specific environment for run `index`; lidar, rates and robot come from `base`.
EnvConfig suite_episode_config(const SuiteSpec& suite, int index, std::uint64_t root_seed,
                               const EnvConfig& base = {});

struct PedestrianPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// One record per policy step.
struct StepRecord {
  double time = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double linear = 0.0;   ///< applied twist after the step
  double angular = 0.0;
  std::optional<Action> action;  ///< empty for direct twist commands
  RewardParts reward;
  bool ego_violation = false;
  int social_violations = 0;
  double closest = 0.0;
  std::vector<PedestrianPose> pedestrians;
};

struct EpisodeLog {
  std::string suite;
  std::string policy;
  int run = 0;
  std::uint64_t seed = 0;  ///< map seed of this run
  nlohmann::json config;
  std::vector<StepRecord> steps;
  Outcome outcome = Outcome::running;
  std::optional<double> arriving_time;  ///< seconds, successes only
};

EpisodeLog run_episode(const EnvConfig& config, Policy& policy);

/**
 * Runs `runs` episodes of the suite. Episodes are spread over `jobs` worker
 * threads, each with its own policy clone; logs come back in run order.
 */
std::vector<EpisodeLog> run_suite(const Policy& policy, const SuiteSpec& suite, int runs,
                                  std::uint64_t root_seed, const EnvConfig& base = {},
                                  int jobs = 1);

struct Metrics {
  int runs = 0;
  double success_rate = 0.0;  ///< percent
  double arriving_time_mean = 0.0;
  double arriving_time_std = 0.0;
  double ego_score = 0.0;
  double social_score = 0.0;
};

/// Ego steps: d < r + 0.4. Social steps: at least one zone overlap.
double ego_score(const EpisodeLog& log);
double social_score(const EpisodeLog& log);
/// Throws std::invalid_argument on an empty list.
Metrics compute_metrics(const std::vector<EpisodeLog>& logs);

enum class ExportFormat { trajectory, metrics, curve };
/// Throws std::invalid_argument for anything but trajectory, metrics or curve.
ExportFormat parse_export_format(const std::string& name);

/// Flat CSV, one row per step of every episode, %.9g numbers.
std::string trajectory_csv(const std::vector<EpisodeLog>& logs);
/// Parses trajectory_csv output back into logs (config snapshots are not kept).
std::vector<EpisodeLog> parse_trajectory_csv(const std::string& text);

nlohmann::json metrics_json(const Metrics& metrics, const std::string& suite,
                            const std::string& policy, std::uint64_t seed);

/// Training curve JSONL to CSV with a fixed column set.
std::string curve_csv(const std::string& jsonl);

/// `<stem>_<suite>_<policy>_seed<seed>.<ext>`
std::string export_filename(const std::string& stem, const std::string& suite,
                            const std::string& policy, std::uint64_t seed,
                            const std::string& ext);

/// Writes trajectory CSV and metrics JSON into `dir`; returns the paths written.
std::vector<std::filesystem::path> export_suite(const std::vector<EpisodeLog>& logs,
                                                const Metrics& metrics,
                                                const std::filesystem::path& dir,
                                                std::uint64_t seed);

std::string format_number(double value);

}  // namespace socnav
