// Command-line front end: train, eval, scenario-gen, replay-export.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "socnav/baselines.hpp"
#include "socnav/config.hpp"
#include "socnav/eval.hpp"
#include "socnav/train.hpp"

namespace fs = std::filesystem;
using namespace socnav;

namespace {

constexpr int kUsageError = 2;
constexpr int kDiverged = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

EnvConfig load_env(const std::string& path) {
  EnvConfig base;
  base.lidar.beams = 180;
  if (path.empty()) return base;
  return env_config_from_json(read_json_file(path), base);
}

SuiteSpec suite_or_usage(const std::string& name) {
  try {
    return parse_suite(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

struct TrainArgs {
  std::string config;
  std::string stage;
  std::string warm_start;
  std::string out = "train_out";
  std::optional<std::uint64_t> seed;
  std::optional<long long> budget;
  bool allow_cold_social = false;
  bool single_thread = false;
};

int cmd_train(const TrainArgs& args) {
  nlohmann::json j = args.config.empty() ? nlohmann::json::object() : read_json_file(args.config);
  if (!args.stage.empty()) {
    try {
      parse_stage(args.stage);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    j["stage"] = args.stage;
  }
  if (args.seed) j["seed"] = *args.seed;
  if (args.budget) j["budget"] = *args.budget;
  if (args.allow_cold_social) j["allow_cold_social"] = true;
  const TrainConfig config = TrainConfig::from_json(j);
  if (config.stage == Stage::social && args.warm_start.empty() && !config.allow_cold_social) {
    throw UsageError(
        "--stage social needs --warm-start <ego checkpoint> (or --allow-cold-social)");
  }
  std::optional<Checkpoint> warm;
  if (!args.warm_start.empty()) warm = load_checkpoint(args.warm_start);

  fs::create_directories(args.out);
  write_json_file(fs::path(args.out) / "train_config.json", config.to_json());
  std::ofstream curve(fs::path(args.out) / "curve.jsonl", std::ios::binary | std::ios::trunc);
  TrainHooks hooks;
  hooks.on_curve = [&](const nlohmann::json& rec) {
    curve << rec.dump() << '\n';
    curve.flush();
  };
  hooks.on_checkpoint = [&](const Checkpoint& ck, long long step) {
    save_checkpoint(ck, fs::path(args.out) / ("checkpoint_" + std::to_string(step) + ".ckpt"));
    std::fprintf(stderr, "checkpoint at step %lld\n", step);
  };
  try {
    const TrainResult result = train(config, warm, hooks);
    save_checkpoint(result.checkpoint, fs::path(args.out) / "final.ckpt");
    std::printf("trained %lld steps over %d episodes; wrote %s\n", result.steps, result.episodes,
                (fs::path(args.out) / "final.ckpt").string().c_str());
  } catch (const TrainingDiverged& e) {
    write_json_file(fs::path(args.out) / "divergence.json", e.diagnostics());
    std::fprintf(stderr, "error: %s\n%s\n", e.what(), e.diagnostics().dump(2).c_str());
    return kDiverged;
  }
  return 0;
}

struct EvalArgs {
  std::string policy = "greedy";
  std::string config;
  std::string suite = "mapless";
  int runs = 10;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool single_thread = false;
  std::string out = "eval_out";
};

std::unique_ptr<Policy> make_policy(const std::string& spec, const LidarConfig& lidar) {
  if (spec == "greedy") return std::make_unique<GreedyPolicy>(lidar);
  if (spec == "cadrl") return make_cadrl_policy();
  if (!fs::exists(spec)) {
    throw UsageError("--policy must be greedy, cadrl or a checkpoint file; '" + spec +
                     "' does not exist");
  }
  const Checkpoint ck = load_checkpoint(spec);
  const NetworkSpec net = NetworkSpec::from_json(ck.metadata.at("network"));
  if (net.beams != lidar.beams) {
    throw std::runtime_error("checkpoint expects " + std::to_string(net.beams) +
                             " beams but the config has " + std::to_string(lidar.beams));
  }
  const std::string want = config_hash(net, lidar);
  const std::string have = ck.metadata.value("config_hash", std::string());
  if (have != want) {
    std::fprintf(stderr, "warning: checkpoint config hash %s differs from current %s\n",
                 have.c_str(), want.c_str());
  }
  std::string name = ck.metadata.value("stage", std::string("actor"));
  return policy_from_checkpoint(ck, lidar, name);
}

int cmd_eval(const EvalArgs& args) {
  const SuiteSpec suite = suite_or_usage(args.suite);
  const EnvConfig base = load_env(args.config);
  const auto policy = make_policy(args.policy, base.lidar);
  int jobs = args.jobs > 0 ? args.jobs : static_cast<int>(std::thread::hardware_concurrency());
  if (args.single_thread || jobs < 1) jobs = 1;
  const auto logs = run_suite(*policy, suite, args.runs, args.seed, base, jobs);
  const Metrics m = compute_metrics(logs);
  const auto files = export_suite(logs, m, args.out, args.seed);
  std::printf("%s\n", metrics_json(m, suite.name(), policy->name(), args.seed).dump(2).c_str());
  for (const auto& f : files) std::fprintf(stderr, "wrote %s\n", f.string().c_str());
  return 0;
}

struct ScenarioArgs {
  std::string config;
  std::string suite = "crowd-crossing-8";
  int runs = 10;
  std::uint64_t seed = 0;
  std::string out = "scenarios";
};

nlohmann::json shape_json(const Shape& s) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return {{"type", "circle"}, {"center", {v.center().x, v.center().y}}, {"radius", v.radius()}};
        } else if constexpr (std::is_same_v<T, Segment>) {
          return {{"type", "segment"}, {"a", {v.a().x, v.a().y}}, {"b", {v.b().x, v.b().y}}};
        } else {
          const Vec2 c = v.center();
          return {{"type", "rect"},
                  {"center", {c.x, c.y}},
                  {"heading", v.heading()},
                  {"half_length", v.half_length()},
                  {"half_width", v.half_width()}};
        }
      },
      s);
}

int cmd_scenario_gen(const ScenarioArgs& args) {
  const SuiteSpec suite = suite_or_usage(args.suite);
  const EnvConfig base = load_env(args.config);
  fs::create_directories(args.out);
  for (int i = 0; i < args.runs; ++i) {
    const EnvConfig cfg = suite_episode_config(suite, i, args.seed, base);
    Environment env(cfg);
    env.reset();
    nlohmann::json obstacles = nlohmann::json::array();
    for (const auto& s : env.obstacles()) obstacles.push_back(shape_json(s));
    nlohmann::json peds = nlohmann::json::array();
    for (const auto& p : env.pedestrians()) {
      peds.push_back({{"id", p.id},
                      {"position", {p.position.x, p.position.y}},
                      {"goal", {p.goal.x, p.goal.y}},
                      {"pref_speed", p.pref_speed},
                      {"radius", p.radius},
                      {"rect_body", p.rect_body}});
    }
    const nlohmann::json doc = {{"suite", suite.name()},
                                {"run", i},
                                {"config", to_json(cfg)},
                                {"obstacles", obstacles},
                                {"pedestrians", peds}};
    const auto path = fs::path(args.out) /
                      ("scenario_" + suite.name() + "_seed" + std::to_string(args.seed) + "_run" +
                       std::to_string(i) + ".json");
    write_json_file(path, doc);
  }
  std::printf("wrote %d scenarios to %s\n", args.runs, args.out.c_str());
  return 0;
}

struct ExportArgs {
  std::string input;
  std::string format = "trajectory";
  std::string out;
};

int cmd_replay_export(const ExportArgs& args) {
  ExportFormat format;
  try {
    format = parse_export_format(args.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string text = read_text(args.input);
  std::string result;
  switch (format) {
    case ExportFormat::trajectory:
      result = trajectory_csv(parse_trajectory_csv(text));
      break;
    case ExportFormat::metrics: {
      const auto logs = parse_trajectory_csv(text);
      if (logs.empty()) throw std::runtime_error("trajectory table has no episodes");
      result = metrics_json(compute_metrics(logs), logs.front().suite, logs.front().policy,
                            0).dump(2) + "\n";
      break;
    }
    case ExportFormat::curve:
      result = curve_csv(text);
      break;
  }
  if (args.out.empty()) {
    std::fwrite(result.data(), 1, result.size(), stdout);
  } else {
    write_text(args.out, result);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socnav: crowd-aware mapless navigation simulator and trainer"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "train an ego or social policy with DDPG");
  train_cmd->add_option("--config", ta.config, "training config JSON");
  train_cmd->add_option("--stage", ta.stage, "ego or social (overrides the config)");
  train_cmd->add_option("--warm-start", ta.warm_start, "checkpoint to start from");
  train_cmd->add_option("--out", ta.out, "output directory")->capture_default_str();
  train_cmd->add_option("--seed", ta.seed, "root seed (overrides the config)");
  train_cmd->add_option("--budget", ta.budget, "environment steps (overrides the config)");
  train_cmd->add_flag("--allow-cold-social", ta.allow_cold_social,
                      "allow the social stage without a warm start");
  train_cmd->add_flag("--single-thread", ta.single_thread,
                      "accepted for symmetry; training always runs on one thread");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a policy on a scenario suite");
  eval_cmd->add_option("--policy", ea.policy, "greedy, cadrl or a checkpoint path")
      ->capture_default_str();
  eval_cmd->add_option("--config", ea.config, "environment config JSON (lidar, robot, rewards)");
  eval_cmd->add_option("--suite", ea.suite, valid_suites_help())->capture_default_str();
  eval_cmd->add_option("--runs", ea.runs, "episodes")->capture_default_str()->check(
      CLI::PositiveNumber);
  eval_cmd->add_option("--seed", ea.seed, "root seed")->capture_default_str();
  eval_cmd->add_option("--jobs", ea.jobs, "worker threads (default: all cores)");
  eval_cmd->add_flag("--single-thread", ea.single_thread, "run episodes on one thread");
  eval_cmd->add_option("--out", ea.out, "output directory")->capture_default_str();

  ScenarioArgs sa;
  auto* gen_cmd = app.add_subcommand("scenario-gen", "write the episode setups of a suite");
  gen_cmd->add_option("--config", sa.config, "environment config JSON");
  gen_cmd->add_option("--suite", sa.suite, valid_suites_help())->capture_default_str();
  gen_cmd->add_option("--runs", sa.runs, "episodes")->capture_default_str()->check(
      CLI::PositiveNumber);
  gen_cmd->add_option("--seed", sa.seed, "root seed")->capture_default_str();
  gen_cmd->add_option("--out", sa.out, "output directory")->capture_default_str();

  ExportArgs xa;
  auto* export_cmd = app.add_subcommand("replay-export", "convert logged data for plotting");
  export_cmd->add_option("--in", xa.input, "trajectory CSV or curve JSONL")->required();
  export_cmd->add_option("--format", xa.format, "trajectory, metrics or curve")
      ->capture_default_str();
  export_cmd->add_option("--out", xa.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every other parse failure is a usage error.
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*train_cmd) return cmd_train(ta);
    if (*eval_cmd) return cmd_eval(ea);
    if (*gen_cmd) return cmd_scenario_gen(sa);
    if (*export_cmd) return cmd_replay_export(xa);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
