#include "adr/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "adr/env.hpp"
#include "adr/harness.hpp"
#include "adr/planners.hpp"
#include "adr/plot.hpp"
#include "adr/ppo.hpp"
#include "adr/rng.hpp"
#include "adr/scenario.hpp"
#include "adr/util.hpp"

namespace adr {

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out_dir;  // empty -> $ADR_OUT_DIR -> "."
  std::string params_file;
  bool quiet = false;
  int workers = 1;
};

void add_global_options(CLI::App* sub, GlobalOptions& global) {
  sub->add_option("--seed", global.seed, "Top-level RNG seed")
      ->capture_default_str();
  sub->add_option("--out-dir", global.out_dir,
                  "Output directory (default: $ADR_OUT_DIR, else '.')");
  sub->add_option("--params-file", global.params_file,
                  "File of key=value mission-parameter overrides");
  sub->add_flag("--quiet", global.quiet, "Suppress progress output");
  sub->add_option("--workers", global.workers,
                  "Execution-width hint; every output is identical for any value")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::filesystem::path resolve_out_dir(const GlobalOptions& global) {
  if (!global.out_dir.empty()) return global.out_dir;
  if (const char* env = std::getenv("ADR_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return ".";
}

std::filesystem::path resolve_path(const std::filesystem::path& out_dir,
                                   const std::string& name) {
  const std::filesystem::path p(name);
  return p.is_absolute() ? p : out_dir / p;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot write: " + path.string());
  }
  return file;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::invalid_argument("cannot read: " + path.string());
  }
  return file;
}

void apply_param_override(MissionParams& params, std::string_view key,
                          std::string_view value) {
  if (key == "n_debris") {
    params.n_debris = static_cast<int>(parse_int(value));
  } else if (key == "collision_probability") {
    params.collision_probability = parse_double(value);
  } else if (key == "zone_half_extents_km") {
    const std::vector<std::string_view> parts = split(value, ',');
    if (parts.size() != 3) {
      throw std::invalid_argument("zone_half_extents_km needs three values");
    }
    params.zone_half_extents_km = {parse_double(parts[0]), parse_double(parts[1]),
                                   parse_double(parts[2])};
  } else if (key == "clearance_km") {
    params.clearance_km = parse_double(value);
  } else if (key == "max_delta_v_km_s") {
    params.max_delta_v_km_s = parse_double(value);
  } else if (key == "max_duration_s") {
    params.max_duration_s = parse_double(value);
  } else if (key == "refuel_service_penalty_s") {
    params.refuel_service_penalty_s = parse_double(value);
  } else if (key == "refuel_orbit_altitude_km") {
    params.refuel_orbit_altitude_km = parse_double(value);
  } else if (key == "sample_interval_s") {
    params.sample_interval_s = parse_double(value);
  } else {
    throw std::invalid_argument("unknown mission parameter: '" + std::string(key) +
                                "'");
  }
}

MissionParams load_mission_params(const std::string& params_file) {
  MissionParams params;
  if (params_file.empty()) return params;
  std::ifstream file(params_file);
  if (!file) {
    throw std::invalid_argument("cannot read params file: " + params_file);
  }
  std::string line;
  long long line_no = 0;
  while (std::getline(file, line)) {
    line_no += 1;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("params file line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    apply_param_override(params, std::string_view(line).substr(0, eq),
                         std::string_view(line).substr(eq + 1));
  }
  return params;
}

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

void append_global_entries(ConfigEntries& kv, const std::string& subcommand,
                           const GlobalOptions& global,
                           const std::filesystem::path& out_dir) {
  kv.push_back({"subcommand", subcommand});
  kv.push_back({"seed", std::to_string(global.seed)});
  kv.push_back({"out_dir", out_dir.string()});
  kv.push_back({"params_file", global.params_file});
  kv.push_back({"quiet", global.quiet ? "1" : "0"});
  kv.push_back({"workers", std::to_string(global.workers)});
}

void append_mission_entries(ConfigEntries& kv, const MissionParams& p) {
  kv.push_back({"n_debris", std::to_string(p.n_debris)});
  kv.push_back({"collision_probability", format_double(p.collision_probability)});
  kv.push_back({"zone_half_extents_km",
                format_double(p.zone_half_extents_km.x) + "," +
                    format_double(p.zone_half_extents_km.y) + "," +
                    format_double(p.zone_half_extents_km.z)});
  kv.push_back({"clearance_km", format_double(p.clearance_km)});
  kv.push_back({"max_delta_v_km_s", format_double(p.max_delta_v_km_s)});
  kv.push_back({"max_duration_s", format_double(p.max_duration_s)});
  kv.push_back(
      {"refuel_service_penalty_s", format_double(p.refuel_service_penalty_s)});
  kv.push_back(
      {"refuel_orbit_altitude_km", format_double(p.refuel_orbit_altitude_km)});
  kv.push_back({"sample_interval_s", format_double(p.sample_interval_s)});
}

void append_hyper_entries(ConfigEntries& kv, const PPOHyperparams& h) {
  kv.push_back({"learning_rate", format_double(h.learning_rate)});
  kv.push_back({"total_steps", std::to_string(h.total_steps)});
  kv.push_back({"batch_size", std::to_string(h.batch_size)});
  kv.push_back({"gamma", format_double(h.gamma)});
  kv.push_back({"clip_epsilon", format_double(h.clip_epsilon)});
  kv.push_back({"gae_lambda", format_double(h.gae_lambda)});
  kv.push_back({"entropy_coefficient", format_double(h.entropy_coefficient)});
  kv.push_back({"epochs_per_batch", std::to_string(h.epochs_per_batch)});
  kv.push_back({"minibatch_size", std::to_string(h.minibatch_size)});
  kv.push_back(
      {"value_loss_coefficient", format_double(h.value_loss_coefficient)});
  kv.push_back({"max_gradient_norm", format_double(h.max_gradient_norm)});
  kv.push_back({"num_workers", std::to_string(h.num_workers)});
}

/// The reproducibility receipt: every effective value for this run.
void write_config_echo(const std::filesystem::path& out_dir,
                       const std::string& subcommand, const ConfigEntries& kv) {
  std::ofstream file =
      open_output(out_dir / ("resolved_config_" + subcommand + ".txt"));
  for (const auto& [key, value] : kv) {
    file << key << '=' << value << '\n';
  }
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  int n_debris = 50;
  bool n_debris_set = false;
  std::string out = "scenario.csv";
};

void run_generate(const GlobalOptions& global, const GenerateOptions& opts,
                  std::ostream& out) {
  MissionParams params = load_mission_params(global.params_file);
  if (opts.n_debris_set) params.n_debris = opts.n_debris;
  params.validate();

  const std::filesystem::path out_dir = resolve_out_dir(global);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = resolve_path(out_dir, opts.out);
  const Scenario scenario = generate_scenario(global.seed, params);
  save_scenario(scenario, path);

  ConfigEntries kv;
  append_global_entries(kv, "generate", global, out_dir);
  append_mission_entries(kv, params);
  kv.push_back({"out", path.string()});
  write_config_echo(out_dir, "generate", kv);
  if (!global.quiet) out << "wrote " << path.string() << '\n';
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  long long steps = 10'000'000;
  int n_debris = 50;
  double collision_prob = 1.0 / 3.0;
  bool n_debris_set = false;
  bool collision_prob_set = false;
  int batch_size = 2048;
  int minibatch_size = 256;
  int num_workers = 8;
  int epochs = 10;
  double learning_rate = 5e-6;
  double entropy_coef = 0.01;
  int hidden = 256;
  std::string out_policy = "policy.json";
  std::string log = "training_log.csv";
};

void run_train(const GlobalOptions& global, const TrainOptions& opts,
               std::ostream& out) {
  TrainConfig config;
  config.mission = load_mission_params(global.params_file);
  if (opts.n_debris_set) config.mission.n_debris = opts.n_debris;
  if (opts.collision_prob_set) {
    config.mission.collision_probability = opts.collision_prob;
  }
  config.hyper.total_steps = opts.steps;
  config.hyper.batch_size = opts.batch_size;
  config.hyper.minibatch_size = opts.minibatch_size;
  config.hyper.num_workers = opts.num_workers;
  config.hyper.epochs_per_batch = opts.epochs;
  config.hyper.learning_rate = opts.learning_rate;
  config.hyper.entropy_coefficient = opts.entropy_coef;
  config.hidden_size = opts.hidden;
  config.seed = global.seed;

  const std::filesystem::path out_dir = resolve_out_dir(global);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path policy_path = resolve_path(out_dir, opts.out_policy);
  const std::filesystem::path log_path = resolve_path(out_dir, opts.log);
  std::filesystem::path diag_path = policy_path;
  diag_path.replace_extension(".diagnostic.json");
  config.diagnostic_checkpoint_path = diag_path;
  if (!global.quiet) {
    config.on_batch = [&out](const TrainLogRow& row) {
      out << "batch " << row.batch_index << ": steps=" << row.steps
          << " mean_return=" << format_double(row.mean_return)
          << " entropy=" << format_double(row.entropy) << '\n';
    };
  }

  ConfigEntries kv;
  append_global_entries(kv, "train", global, out_dir);
  append_mission_entries(kv, config.mission);
  append_hyper_entries(kv, config.hyper);
  kv.push_back({"hidden_size", std::to_string(config.hidden_size)});
  kv.push_back({"out_policy", policy_path.string()});
  kv.push_back({"log", log_path.string()});
  kv.push_back({"diagnostic_checkpoint", diag_path.string()});
  write_config_echo(out_dir, "train", kv);

  TrainResult result;
  try {
    result = train(config);
  } catch (const std::runtime_error& e) {
    if (std::filesystem::exists(diag_path)) {
      throw std::runtime_error(std::string(e.what()) +
                               " (diagnostic checkpoint: " + diag_path.string() +
                               ")");
    }
    throw;
  }

  save_policy(result.policy, config.hyper, config.seed, policy_path);
  std::ofstream log_file = open_output(log_path);
  write_training_log(result.log, log_file);
  if (!global.quiet) {
    out << "wrote " << policy_path.string() << " and " << log_path.string() << '\n';
  }
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::vector<std::string> modes = {"rl-rl", "rl-greedy", "greedy-rl",
                                    "greedy-greedy"};
  int cases = 100;
  int iterations = 10;
  std::string policy_path;
  std::string out = "report.csv";
};

LoadedPolicy load_policy_argument(const std::string& path) {
  try {
    return load_policy(path);
  } catch (const std::runtime_error& e) {
    // A policy file that cannot be used is an argument problem.
    throw std::invalid_argument(e.what());
  }
}

void run_evaluate(const GlobalOptions& global, const EvaluateOptions& opts,
                  std::ostream& out) {
  const MissionParams params = load_mission_params(global.params_file);
  std::vector<EvaluationMode> modes;
  modes.reserve(opts.modes.size());
  for (const std::string& label : opts.modes) {
    modes.push_back(parse_mode(label));
  }
  bool needs_policy = false;
  for (const EvaluationMode mode : modes) {
    needs_policy = needs_policy || mode_needs_policy(mode);
  }
  if (needs_policy && opts.policy_path.empty()) {
    throw std::invalid_argument("--policy is required for RL-bearing modes");
  }

  LoadedPolicy loaded;
  const PolicyParameters* policy = nullptr;
  if (!opts.policy_path.empty()) {
    loaded = load_policy_argument(opts.policy_path);
    policy = &loaded.policy;
  }

  const std::filesystem::path out_dir = resolve_out_dir(global);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path rows_path = resolve_path(out_dir, opts.out);
  std::filesystem::path summary_path = rows_path;
  summary_path.replace_filename(rows_path.stem().string() + "_summary" +
                                rows_path.extension().string());

  const EvaluationReport report =
      run_suite(modes, params, opts.cases, opts.iterations, policy, global.seed);
  {
    std::ofstream rows_file = open_output(rows_path);
    write_report_rows(report.rows, rows_file);
  }
  {
    std::ofstream summary_file = open_output(summary_path);
    write_summary(report.summary, summary_file);
  }

  ConfigEntries kv;
  append_global_entries(kv, "evaluate", global, out_dir);
  append_mission_entries(kv, params);
  std::string mode_list;
  for (const EvaluationMode mode : modes) {
    if (!mode_list.empty()) mode_list += ',';
    mode_list += mode_label(mode);
  }
  kv.push_back({"modes", mode_list});
  kv.push_back({"cases", std::to_string(opts.cases)});
  kv.push_back({"iterations", std::to_string(opts.iterations)});
  kv.push_back({"policy", opts.policy_path});
  kv.push_back({"out", rows_path.string()});
  kv.push_back({"summary_out", summary_path.string()});
  write_config_echo(out_dir, "evaluate", kv);

  if (!global.quiet) {
    out << "wrote " << rows_path.string() << " and " << summary_path.string()
        << '\n';
    for (const ModeSummary& s : report.summary) {
      out << mode_label(s.mode) << ": avg=" << format_double(s.avg_debris_visited)
          << " max=" << s.max_debris_visited << " min=" << s.min_debris_visited
          << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// trace

struct TraceOptions {
  std::string scenario_path;
  std::string mode = "greedy-greedy";
  std::string policy_path;
  int simulations = 200;
};

Scenario load_scenario_argument(const std::string& path) {
  try {
    return load_scenario(path);
  } catch (const std::runtime_error& e) {
    // A scenario file that cannot be used is an argument problem.
    throw std::invalid_argument(e.what());
  }
}

void run_trace(const GlobalOptions& global, const TraceOptions& opts,
               std::ostream& out) {
  const Scenario scenario = load_scenario_argument(opts.scenario_path);
  const Environment env(scenario);

  const bool use_mcts = opts.mode == "mcts";
  EvaluationMode mode = EvaluationMode::Greedy_Greedy;
  LoadedPolicy loaded;
  const PolicyParameters* policy = nullptr;
  if (!use_mcts) {
    mode = parse_mode(opts.mode);
    if (mode_needs_policy(mode)) {
      if (opts.policy_path.empty()) {
        throw std::invalid_argument("--policy is required for mode " + opts.mode);
      }
      loaded = load_policy_argument(opts.policy_path);
      policy = &loaded.policy;
      ensure_compatible(*policy, env);
    }
  }

  MCTSConfig mcts_config;
  mcts_config.simulations_per_step = opts.simulations;
  SplitMix64 mcts_rng(derive_seed(global.seed, 101));

  MissionState state = env.reset(global.seed);
  while (!state.terminal) {
    Action action = Action::refuel();
    if (use_mcts) {
      action = mcts_select_action(env, state, mcts_config, mcts_rng);
    } else {
      const bool pending = state.pending_target.has_value();
      const bool policy_turn = pending ? (mode == EvaluationMode::RL_RL ||
                                          mode == EvaluationMode::Greedy_RL)
                                       : (mode == EvaluationMode::RL_RL ||
                                          mode == EvaluationMode::RL_Greedy);
      if (policy_turn) {
        action = policy_greedy_action(*policy, env, state);
      } else {
        action = pending ? greedy_ca_min_time(env, state)
                         : greedy_min_dv(env, state);
      }
    }
    env.step(state, action);
  }

  // Zone-trigger entries move nothing; the follow-up CA action tells the
  // story, so the printed trace skips them (CA labels carry the debris id).
  std::string joined;
  for (const TraceEntry& entry : state.trace) {
    if (entry.zone_triggered) continue;
    if (!joined.empty()) joined += " → ";
    joined += entry.action.label();
  }
  out << joined << '\n';
  out << "visited=" << state.visited_count() << " fuel=" << format_double(state.fuel)
      << " time=" << format_double(state.elapsed_s)
      << " termination=" << to_string(state.reason) << '\n';

  const std::filesystem::path out_dir = resolve_out_dir(global);
  std::filesystem::create_directories(out_dir);
  ConfigEntries kv;
  append_global_entries(kv, "trace", global, out_dir);
  append_mission_entries(kv, scenario.params);
  kv.push_back({"scenario", opts.scenario_path});
  kv.push_back({"mode", opts.mode});
  kv.push_back({"policy", opts.policy_path});
  kv.push_back({"simulations", std::to_string(opts.simulations)});
  write_config_echo(out_dir, "trace", kv);
}

// ---------------------------------------------------------------------------
// plot

struct PlotOptions {
  std::string log_path;
  std::string report_path;
  std::string out = "plot.svg";
};

constexpr double kSmoothingAlpha = 0.99;

void run_plot(const GlobalOptions& global, const PlotOptions& opts,
              std::ostream& out) {
  if (opts.log_path.empty() == opts.report_path.empty()) {
    throw std::invalid_argument("pass exactly one of --log or --report");
  }
  const std::filesystem::path out_dir = resolve_out_dir(global);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path svg_path = resolve_path(out_dir, opts.out);
  std::filesystem::path data_path = svg_path;
  data_path.replace_extension(".csv");

  std::string svg;
  std::string data_csv;
  if (!opts.log_path.empty()) {
    std::ifstream in = open_input(opts.log_path);
    const std::vector<TrainLogRow> log = read_training_log(in);
    std::vector<double> xs, raw;
    xs.reserve(log.size());
    raw.reserve(log.size());
    for (const TrainLogRow& row : log) {
      xs.push_back(static_cast<double>(row.steps));
      raw.push_back(row.mean_return);
    }
    const std::vector<double> smoothed = exp_smooth(raw, kSmoothingAlpha);
    svg = line_chart_svg(xs, smoothed, "Training mean return (alpha=0.99)",
                         "environment steps", "smoothed mean return");
    std::ostringstream csv;
    csv << "steps,mean_return,smoothed\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
      csv << log[i].steps << ',' << format_double(raw[i]) << ','
          << format_double(smoothed[i]) << '\n';
    }
    data_csv = csv.str();
  } else {
    std::ifstream in = open_input(opts.report_path);
    const std::vector<EvaluationRow> rows = read_report_rows(in);
    const std::vector<ModeSummary> summary = summarize(rows);
    if (summary.empty()) {
      throw std::invalid_argument("report has no rows to plot: " +
                                  opts.report_path);
    }
    std::vector<std::pair<std::string, double>> bars;
    bars.reserve(summary.size());
    for (const ModeSummary& s : summary) {
      bars.push_back({mode_label(s.mode), s.avg_debris_visited});
    }
    svg = bar_chart_svg(bars, "Average debris visited per mode",
                        "average debris visited");
    std::ostringstream csv;
    write_summary(summary, csv);
    data_csv = csv.str();
  }

  open_output(svg_path) << svg;
  open_output(data_path) << data_csv;

  ConfigEntries kv;
  append_global_entries(kv, "plot", global, out_dir);
  kv.push_back({"log", opts.log_path});
  kv.push_back({"report", opts.report_path});
  kv.push_back({"smoothing_alpha", format_double(kSmoothingAlpha)});
  kv.push_back({"out", svg_path.string()});
  kv.push_back({"data_out", data_path.string()});
  write_config_echo(out_dir, "plot", kv);
  if (!global.quiet) {
    out << "wrote " << svg_path.string() << " and " << data_path.string() << '\n';
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Multi-debris rendezvous mission planning toolkit"};
  app.require_subcommand(1);

  GlobalOptions global;

  GenerateOptions generate_opts;
  CLI::App* generate_cmd =
      app.add_subcommand("generate", "Sample a debris scenario to CSV");
  add_global_options(generate_cmd, global);
  CLI::Option* generate_n_opt =
      generate_cmd->add_option("--n", generate_opts.n_debris, "Debris count")
          ->capture_default_str();
  generate_cmd->add_option("--out", generate_opts.out, "Scenario CSV filename")
      ->capture_default_str();

  TrainOptions train_opts;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train the masked-PPO policy");
  add_global_options(train_cmd, global);
  train_cmd->add_option("--steps", train_opts.steps, "Total environment steps")
      ->capture_default_str();
  CLI::Option* n_debris_opt =
      train_cmd->add_option("--n-debris", train_opts.n_debris, "Debris count")
          ->capture_default_str();
  CLI::Option* collision_opt =
      train_cmd
          ->add_option("--collision-prob", train_opts.collision_prob,
                       "Zone trigger probability")
          ->capture_default_str();
  train_cmd->add_option("--batch-size", train_opts.batch_size, "Rollout batch size")
      ->capture_default_str();
  train_cmd
      ->add_option("--minibatch-size", train_opts.minibatch_size,
                   "SGD minibatch size")
      ->capture_default_str();
  train_cmd
      ->add_option("--num-workers", train_opts.num_workers,
                   "Parallel environment streams")
      ->capture_default_str();
  train_cmd
      ->add_option("--epochs", train_opts.epochs, "Optimization epochs per batch")
      ->capture_default_str();
  train_cmd->add_option("--lr", train_opts.learning_rate, "Adam learning rate")
      ->capture_default_str();
  train_cmd
      ->add_option("--entropy-coef", train_opts.entropy_coef,
                   "Entropy bonus coefficient")
      ->capture_default_str();
  train_cmd->add_option("--hidden", train_opts.hidden, "Hidden layer width")
      ->capture_default_str();
  train_cmd
      ->add_option("--out-policy", train_opts.out_policy, "Checkpoint filename")
      ->capture_default_str();
  train_cmd->add_option("--log", train_opts.log, "Training-log CSV filename")
      ->capture_default_str();

  EvaluateOptions evaluate_opts;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Run the four-mode benchmark suite");
  add_global_options(evaluate_cmd, global);
  evaluate_cmd
      ->add_option("--modes", evaluate_opts.modes,
                   "Modes: rl-rl, rl-greedy, greedy-rl, greedy-greedy")
      ->delimiter(',')
      ->capture_default_str();
  evaluate_cmd->add_option("--cases", evaluate_opts.cases, "Number of test cases")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--iterations", evaluate_opts.iterations,
                   "Iterations per test case")
      ->capture_default_str();
  evaluate_cmd->add_option("--policy", evaluate_opts.policy_path,
                           "Policy checkpoint (required for RL modes)");
  evaluate_cmd->add_option("--out", evaluate_opts.out, "Report rows CSV filename")
      ->capture_default_str();

  TraceOptions trace_opts;
  CLI::App* trace_cmd =
      app.add_subcommand("trace", "Print one episode's action trace");
  add_global_options(trace_cmd, global);
  trace_cmd->add_option("--scenario", trace_opts.scenario_path, "Scenario CSV")
      ->required();
  trace_cmd
      ->add_option("--mode", trace_opts.mode,
                   "rl-rl, rl-greedy, greedy-rl, greedy-greedy, or mcts")
      ->check(CLI::IsMember(
          {"rl-rl", "rl-greedy", "greedy-rl", "greedy-greedy", "mcts"}))
      ->capture_default_str();
  trace_cmd->add_option("--policy", trace_opts.policy_path,
                        "Policy checkpoint (required for RL modes)");
  trace_cmd
      ->add_option("--sims", trace_opts.simulations, "MCTS simulations per step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  PlotOptions plot_opts;
  CLI::App* plot_cmd =
      app.add_subcommand("plot", "Render SVG charts from run outputs");
  add_global_options(plot_cmd, global);
  plot_cmd->add_option("--log", plot_opts.log_path, "Training-log CSV to plot");
  plot_cmd->add_option("--report", plot_opts.report_path,
                       "Evaluation report CSV to plot");
  plot_cmd->add_option("--out", plot_opts.out, "Output SVG filename")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    generate_opts.n_debris_set = generate_n_opt->count() > 0;
    train_opts.n_debris_set = n_debris_opt->count() > 0;
    train_opts.collision_prob_set = collision_opt->count() > 0;
    if (generate_cmd->parsed()) {
      run_generate(global, generate_opts, out);
    } else if (train_cmd->parsed()) {
      run_train(global, train_opts, out);
    } else if (evaluate_cmd->parsed()) {
      run_evaluate(global, evaluate_opts, out);
    } else if (trace_cmd->parsed()) {
      run_trace(global, trace_opts, out);
    } else if (plot_cmd->parsed()) {
      run_plot(global, plot_opts, out);
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace adr
