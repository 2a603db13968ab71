#include "socnav/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "socnav/config.hpp"
#include "socnav/seeding.hpp"

namespace socnav {

namespace {

constexpr ScenarioKind kKinds[] = {ScenarioKind::crossing, ScenarioKind::towards,
                                   ScenarioKind::ahead, ScenarioKind::random};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

Outcome parse_outcome(const std::string& s) {
  for (Outcome o : {Outcome::running, Outcome::reached, Outcome::collided, Outcome::timeout}) {
    if (s == to_string(o)) return o;
  }
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::string SuiteSpec::name() const {
  if (kind == SuiteKind::mapless) return "mapless";
  const std::string prefix = kind == SuiteKind::crowd ? "crowd-" : "combined-";
  return prefix + std::string(to_string(scenario)) + "-" + std::to_string(pedestrians);
}

std::string valid_suites_help() {
  return "valid suites: mapless, crowd-<kind>-<count>, combined-<kind>-<count> "
         "with <kind> one of crossing, towards, ahead, random and <count> >= 1 "
         "(e.g. crowd-crossing-8)";
}

SuiteSpec parse_suite(const std::string& name) {
  if (name == "mapless" || name == "mapless-10maps") return {};
  const auto parts = split(name, '-');
  if (parts.size() == 3 && (parts[0] == "crowd" || parts[0] == "combined")) {
    SuiteSpec s;
    s.kind = parts[0] == "crowd" ? SuiteKind::crowd : SuiteKind::combined;
    try {
      s.scenario = parse_scenario_kind(parts[1]);
      std::size_t used = 0;
      s.pedestrians = std::stoi(parts[2], &used);
      if (used == parts[2].size() && s.pedestrians >= 1) return s;
    } catch (const std::exception&) {
    }
  }
  throw std::invalid_argument("unknown suite '" + name + "'; " + valid_suites_help());
}

EnvConfig suite_episode_config(const SuiteSpec& suite, int index, std::uint64_t root_seed,
                               const EnvConfig& base) {
  EnvConfig c = base;
  c.map_seed = derive_seed(root_seed, "eval-map", static_cast<std::uint64_t>(index));
  c.crowd.seed = derive_seed(root_seed, "eval-crowd", static_cast<std::uint64_t>(index));
  c.start = {-3.5, 0.0};
  c.goal = {3.5, 0.0};
  c.start_heading = 0.0;
  c.map.arena = {{0.0, 0.0}, {5.0, 5.0}};
  c.map.walls = true;
  c.crowd.area = {{0.0, 0.0}, {2.5, 2.5}};
  c.include_social_reward = true;
  switch (suite.kind) {
    case SuiteKind::mapless:
      c.map.count_min = 6;
      c.map.count_max = 10;
      c.crowd.count = 0;
      c.crowd.walk_in_probability = 0.0;
      c.scenario.reset();
      break;
    case SuiteKind::crowd:
    case SuiteKind::combined:
      c.map.count_min = suite.kind == SuiteKind::crowd ? 0 : 3;
      c.map.count_max = suite.kind == SuiteKind::crowd ? 0 : 5;
      c.crowd.count = suite.pedestrians;
      c.crowd.walk_in_probability = 0.005;  // about one walk-in per 5 s
      c.crowd.stop_go_probability = 0.002;
      c.scenario = suite.scenario;
      break;
  }
  c.validate();
  return c;
}

EpisodeLog run_episode(const EnvConfig& config, Policy& policy) {
  Environment env(config);
  EpisodeLog log;
  log.policy = policy.name();
  log.seed = config.map_seed;
  log.config = to_json(config);
  policy.reset();
  MotionFeature feature = env.reset();
  while (env.outcome() == Outcome::running) {
    const Observation obs{feature, env.latest_scan(), env.robot(), env.pedestrians()};
    const Command cmd = policy.act(obs);
    StepOutcome out = env.step(cmd);

    StepRecord r;
    r.time = out.info.sim_time;
    r.x = env.robot().pose.position.x;
    r.y = env.robot().pose.position.y;
    r.heading = env.robot().pose.heading;
    r.linear = env.robot().twist.linear;
    r.angular = env.robot().twist.angular;
    if (const auto* a = std::get_if<Action>(&cmd)) r.action = a->clamped();
    r.reward = out.parts;
    r.ego_violation = out.info.ego_violation;
    r.social_violations = out.info.social_violations;
    r.closest = out.info.closest;
    r.pedestrians.reserve(env.pedestrians().size());
    for (const auto& p : env.pedestrians()) {
      r.pedestrians.push_back({p.position.x, p.position.y, p.motion_heading});
    }
    log.steps.push_back(std::move(r));
    feature = std::move(out.observation);
  }
  log.outcome = env.outcome();
  if (log.outcome == Outcome::reached) log.arriving_time = env.sim_time();
  return log;
}

std::vector<EpisodeLog> run_suite(const Policy& policy, const SuiteSpec& suite, int runs,
                                  std::uint64_t root_seed, const EnvConfig& base, int jobs) {
  if (runs < 1) throw std::invalid_argument("runs must be positive");
  std::vector<EpisodeLog> logs(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    auto local = policy.clone();
    for (int i = next++; i < runs; i = next++) {
      try {
        EpisodeLog log = run_episode(suite_episode_config(suite, i, root_seed, base), *local);
        log.suite = suite.name();
        log.run = i;
        logs[static_cast<std::size_t>(i)] = std::move(log);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };
  const int threads = std::clamp(jobs, 1, runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return logs;
}

double ego_score(const EpisodeLog& log) {
  if (log.steps.empty()) return 100.0;
  const auto k = std::count_if(log.steps.begin(), log.steps.end(),
                               [](const StepRecord& r) { return r.ego_violation; });
  return (1.0 - static_cast<double>(k) / static_cast<double>(log.steps.size())) * 100.0;
}

double social_score(const EpisodeLog& log) {
  if (log.steps.empty()) return 100.0;
  const auto m = std::count_if(log.steps.begin(), log.steps.end(),
                               [](const StepRecord& r) { return r.social_violations >= 1; });
  return (1.0 - static_cast<double>(m) / static_cast<double>(log.steps.size())) * 100.0;
}

Metrics compute_metrics(const std::vector<EpisodeLog>& logs) {
  if (logs.empty()) throw std::invalid_argument("compute_metrics needs at least one episode");
  Metrics m;
  m.runs = static_cast<int>(logs.size());
  std::vector<double> times;
  double ego = 0.0;
  double social = 0.0;
  for (const auto& log : logs) {
    if (log.outcome == Outcome::reached && log.arriving_time) times.push_back(*log.arriving_time);
    ego += ego_score(log);
    social += social_score(log);
  }
  m.success_rate = 100.0 * static_cast<double>(times.size()) / m.runs;
  m.ego_score = ego / m.runs;
  m.social_score = social / m.runs;
  if (times.empty()) {
    m.arriving_time_mean = std::numeric_limits<double>::quiet_NaN();
    m.arriving_time_std = std::numeric_limits<double>::quiet_NaN();
  } else {
    double sum = 0.0;
    for (double t : times) sum += t;
    m.arriving_time_mean = sum / static_cast<double>(times.size());
    double var = 0.0;
    for (double t : times) var += (t - m.arriving_time_mean) * (t - m.arriving_time_mean);
    m.arriving_time_std =
        times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
  }
  return m;
}

ExportFormat parse_export_format(const std::string& name) {
  if (name == "trajectory") return ExportFormat::trajectory;
  if (name == "metrics") return ExportFormat::metrics;
  if (name == "curve") return ExportFormat::curve;
  throw std::invalid_argument("unknown export format '" + name +
                              "'; expected trajectory, metrics or curve");
}

namespace {
constexpr const char* kTrajectoryHeader =
    "suite,policy,run,seed,step,time,x,y,heading,linear,angular,ax,ay,r_ego,r_social,r_goal,"
    "ego_violation,social_violations,closest,outcome,arriving_time,pedestrians";
}

std::string trajectory_csv(const std::vector<EpisodeLog>& logs) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const auto& log : logs) {
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
      const StepRecord& r = log.steps[i];
      const bool last = i + 1 == log.steps.size();
      std::string peds;
      for (std::size_t k = 0; k < r.pedestrians.size(); ++k) {
        if (k > 0) peds += ';';
        peds += format_number(r.pedestrians[k].x) + ':' + format_number(r.pedestrians[k].y) +
                ':' + format_number(r.pedestrians[k].heading);
      }
      out += log.suite + ',' + log.policy + ',' + std::to_string(log.run) + ',' +
             std::to_string(log.seed) + ',' + std::to_string(i + 1) + ',' +
             format_number(r.time) + ',' + format_number(r.x) + ',' + format_number(r.y) + ',' +
             format_number(r.heading) + ',' + format_number(r.linear) + ',' +
             format_number(r.angular) + ',' + (r.action ? format_number(r.action->ax) : "") +
             ',' + (r.action ? format_number(r.action->ay) : "") + ',' +
             format_number(r.reward.ego) + ',' + format_number(r.reward.social) + ',' +
             format_number(r.reward.goal) + ',' + (r.ego_violation ? "1" : "0") + ',' +
             std::to_string(r.social_violations) + ',' + format_number(r.closest) + ',' +
             (last ? std::string(to_string(log.outcome)) : "") + ',' +
             (last && log.arriving_time ? format_number(*log.arriving_time) : "") + ',' + peds +
             '\n';
    }
  }
  return out;
}

std::vector<EpisodeLog> parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw std::invalid_argument("not a trajectory table: header mismatch");
  }
  std::vector<EpisodeLog> logs;
  bool open = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 22) throw std::invalid_argument("trajectory row has wrong field count");
    const int run = std::stoi(f[2]);
    if (!open || logs.back().run != run) {
      EpisodeLog log;
      log.suite = f[0];
      log.policy = f[1];
      log.run = run;
      log.seed = std::stoull(f[3]);
      logs.push_back(std::move(log));
      open = true;
    }
    EpisodeLog& log = logs.back();
    StepRecord r;
    r.time = parse_double(f[5]);
    r.x = parse_double(f[6]);
    r.y = parse_double(f[7]);
    r.heading = parse_double(f[8]);
    r.linear = parse_double(f[9]);
    r.angular = parse_double(f[10]);
    if (!f[11].empty()) r.action = Action{parse_double(f[11]), parse_double(f[12])};
    r.reward = {parse_double(f[13]), parse_double(f[14]), parse_double(f[15])};
    r.ego_violation = f[16] == "1";
    r.social_violations = std::stoi(f[17]);
    r.closest = parse_double(f[18]);
    if (!f[19].empty()) log.outcome = parse_outcome(f[19]);
    if (!f[20].empty()) log.arriving_time = parse_double(f[20]);
    if (!f[21].empty()) {
      for (const auto& p : split(f[21], ';')) {
        const auto xyz = split(p, ':');
        if (xyz.size() != 3) throw std::invalid_argument("bad pedestrian field");
        r.pedestrians.push_back(
            {parse_double(xyz[0]), parse_double(xyz[1]), parse_double(xyz[2])});
      }
    }
    log.steps.push_back(std::move(r));
  }
  return logs;
}

nlohmann::json metrics_json(const Metrics& m, const std::string& suite,
                            const std::string& policy, std::uint64_t seed) {
  const auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"suite", suite},
          {"policy", policy},
          {"seed", seed},
          {"runs", m.runs},
          {"metrics",
           {{"success_rate", m.success_rate},
            {"arriving_time", {{"mean", num(m.arriving_time_mean)}, {"std", num(m.arriving_time_std)}}},
            {"ego_score", m.ego_score},
            {"social_score", m.social_score}}}};
}

std::string curve_csv(const std::string& jsonl) {
  static const char* const kColumns[] = {"episode",     "step",          "return",
                                         "success_rate", "critic_loss",  "actor_objective",
                                         "sigma",       "outcome"};
  std::string out;
  for (const char* c : kColumns) {
    if (c != kColumns[0]) out += ',';
    out += c;
  }
  out += '\n';
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    bool first = true;
    for (const char* c : kColumns) {
      if (!first) out += ',';
      first = false;
      const auto it = j.find(c);
      if (it == j.end() || it->is_null()) continue;
      if (it->is_string()) {
        out += it->get<std::string>();
      } else if (it->is_number_integer()) {
        out += std::to_string(it->get<long long>());
      } else {
        out += format_number(it->get<double>());
      }
    }
    out += '\n';
  }
  return out;
}

std::string export_filename(const std::string& stem, const std::string& suite,
                            const std::string& policy, std::uint64_t seed,
                            const std::string& ext) {
  return stem + "_" + suite + "_" + policy + "_seed" + std::to_string(seed) + "." + ext;
}

std::vector<std::filesystem::path> export_suite(const std::vector<EpisodeLog>& logs,
                                                const Metrics& metrics,
                                                const std::filesystem::path& dir,
                                                std::uint64_t seed) {
  if (logs.empty()) throw std::invalid_argument("nothing to export");
  std::filesystem::create_directories(dir);
  const std::string& suite = logs.front().suite;
  const std::string& policy = logs.front().policy;
  const auto traj = dir / export_filename("trajectory", suite, policy, seed, "csv");
  const auto met = dir / export_filename("metrics", suite, policy, seed, "json");
  {
    std::ofstream out(traj, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + traj.string());
    out << trajectory_csv(logs);
  }
  write_json_file(met, metrics_json(metrics, suite, policy, seed));
  return {traj, met};
}

}  // namespace socnav
