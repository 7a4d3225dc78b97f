#include "adr/harness.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "adr/planners.hpp"
#include "adr/rng.hpp"
#include "adr/util.hpp"

namespace adr {

namespace {

constexpr const char* kRowHeader =
    "case_id,iteration,mode,debris_visited,mission_time_s,collided,refuels,"
    "replans,dv_spent_total";

/// Dispatches the next decision to the mode's sequencer or CA handler.
Action pick_action(EvaluationMode mode, const Environment& env,
                   const MissionState& state, const PolicyParameters* policy) {
  const bool pending = state.pending_target.has_value();
  const bool policy_turn = pending ? (mode == EvaluationMode::RL_RL ||
                                      mode == EvaluationMode::Greedy_RL)
                                   : (mode == EvaluationMode::RL_RL ||
                                      mode == EvaluationMode::RL_Greedy);
  if (policy_turn) return policy_greedy_action(*policy, env, state);
  return pending ? greedy_ca_min_time(env, state) : greedy_min_dv(env, state);
}

EvaluationRow tally_episode(const MissionState& state, EvaluationMode mode,
                            int case_id, int iteration) {
  EvaluationRow row;
  row.case_id = case_id;
  row.iteration = iteration;
  row.mode = mode;
  row.debris_visited = state.visited_count();
  row.mission_time_s = state.elapsed_s;
  row.collided = state.reason == TerminationReason::Collision;
  row.dv_spent_total_km_s = state.dv_spent_total_km_s;
  for (const TraceEntry& entry : state.trace) {
    switch (entry.action.kind) {
      case Action::Kind::Refuel:
        row.refuel_events += 1;
        break;
      case Action::Kind::CaAbove:
      case Action::Kind::CaBelow:
        row.replans += 1;
        break;
      default:
        break;
    }
  }
  return row;
}

}  // namespace

std::string mode_label(EvaluationMode mode) {
  switch (mode) {
    case EvaluationMode::RL_RL: return "rl-rl";
    case EvaluationMode::RL_Greedy: return "rl-greedy";
    case EvaluationMode::Greedy_RL: return "greedy-rl";
    case EvaluationMode::Greedy_Greedy: return "greedy-greedy";
  }
  throw std::logic_error("unreachable mode");
}

EvaluationMode parse_mode(const std::string& label) {
  if (label == "rl-rl") return EvaluationMode::RL_RL;
  if (label == "rl-greedy") return EvaluationMode::RL_Greedy;
  if (label == "greedy-rl") return EvaluationMode::Greedy_RL;
  if (label == "greedy-greedy") return EvaluationMode::Greedy_Greedy;
  throw std::invalid_argument("unknown evaluation mode: '" + label + "'");
}

bool mode_needs_policy(EvaluationMode mode) {
  return mode != EvaluationMode::Greedy_Greedy;
}

std::vector<EvaluationRow> run_mode(EvaluationMode mode, const Scenario& scenario,
                                    int iterations, const PolicyParameters* policy,
                                    std::uint64_t seed, int case_id) {
  if (iterations < 1) {
    throw std::invalid_argument("run_mode requires at least one iteration");
  }
  const Environment env(scenario);
  if (mode_needs_policy(mode)) {
    if (!policy) {
      throw std::invalid_argument("mode " + mode_label(mode) +
                                  " requires a policy network");
    }
    ensure_compatible(*policy, env);
  }

  std::vector<EvaluationRow> rows;
  rows.reserve(iterations);
  for (int iteration = 0; iteration < iterations; ++iteration) {
    // Derived from the iteration only, never the mode: all modes face the
    // same chance stream for iteration k of a given case.
    MissionState state = env.reset(derive_seed(seed, iteration));
    while (!state.terminal) {
      env.step(state, pick_action(mode, env, state, policy));
    }
    rows.push_back(tally_episode(state, mode, case_id, iteration));
  }
  return rows;
}

std::vector<ModeSummary> summarize(const std::vector<EvaluationRow>& rows) {
  std::vector<ModeSummary> summary;
  std::vector<long long> counts;
  std::vector<long long> totals;
  for (const EvaluationRow& row : rows) {
    std::size_t slot = summary.size();
    for (std::size_t i = 0; i < summary.size(); ++i) {
      if (summary[i].mode == row.mode) {
        slot = i;
        break;
      }
    }
    if (slot == summary.size()) {
      summary.push_back({row.mode, 0.0, row.debris_visited, row.debris_visited});
      counts.push_back(0);
      totals.push_back(0);
    }
    ModeSummary& acc = summary[slot];
    acc.max_debris_visited = std::max(acc.max_debris_visited, row.debris_visited);
    acc.min_debris_visited = std::min(acc.min_debris_visited, row.debris_visited);
    totals[slot] += row.debris_visited;
    counts[slot] += 1;
  }
  for (std::size_t i = 0; i < summary.size(); ++i) {
    summary[i].avg_debris_visited =
        static_cast<double>(totals[i]) / static_cast<double>(counts[i]);
  }
  return summary;
}

EvaluationReport run_suite(const std::vector<EvaluationMode>& modes,
                           const MissionParams& params, int n_test_cases,
                           int iterations, const PolicyParameters* policy,
                           std::uint64_t seed) {
  if (modes.empty()) {
    throw std::invalid_argument("run_suite requires at least one mode");
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i] == modes[j]) {
        throw std::invalid_argument("duplicate mode: " + mode_label(modes[i]));
      }
    }
  }
  if (n_test_cases < 1 || iterations < 1) {
    throw std::invalid_argument("run_suite requires positive case/iteration counts");
  }
  params.validate();

  EvaluationReport report;
  report.rows.reserve(static_cast<std::size_t>(n_test_cases) * iterations *
                      modes.size());
  for (int case_id = 0; case_id < n_test_cases; ++case_id) {
    const Scenario scenario =
        generate_scenario(derive_seed(seed, 1, case_id), params);
    const std::uint64_t case_seed = derive_seed(seed, 2, case_id);

    // One run per mode, then interleave into (case, iteration, mode) order.
    std::vector<std::vector<EvaluationRow>> per_mode;
    per_mode.reserve(modes.size());
    for (const EvaluationMode mode : modes) {
      per_mode.push_back(
          run_mode(mode, scenario, iterations, policy, case_seed, case_id));
    }
    for (int iteration = 0; iteration < iterations; ++iteration) {
      for (std::size_t m = 0; m < modes.size(); ++m) {
        report.rows.push_back(per_mode[m][iteration]);
      }
    }
  }
  report.summary = summarize(report.rows);
  return report;
}

void write_report_rows(const std::vector<EvaluationRow>& rows, std::ostream& out) {
  out << kRowHeader << '\n';
  for (const EvaluationRow& row : rows) {
    out << row.case_id << ',' << row.iteration << ',' << mode_label(row.mode) << ','
        << row.debris_visited << ',' << format_double(row.mission_time_s) << ','
        << (row.collided ? 1 : 0) << ',' << row.refuel_events << ',' << row.replans
        << ',' << format_double(row.dv_spent_total_km_s) << '\n';
  }
}

std::vector<EvaluationRow> read_report_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRowHeader) {
    throw std::invalid_argument("report CSV line 1: missing or unexpected header");
  }
  std::vector<EvaluationRow> rows;
  long long line_no = 1;
  while (std::getline(in, line)) {
    line_no += 1;
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split(line, ',');
    if (fields.size() != 9) {
      throw std::invalid_argument("report CSV line " + std::to_string(line_no) +
                                  ": expected 9 fields");
    }
    try {
      EvaluationRow row;
      row.case_id = static_cast<int>(parse_int(fields[0]));
      row.iteration = static_cast<int>(parse_int(fields[1]));
      row.mode = parse_mode(std::string(fields[2]));
      row.debris_visited = static_cast<int>(parse_int(fields[3]));
      row.mission_time_s = parse_double(fields[4]);
      row.collided = parse_int(fields[5]) != 0;
      row.refuel_events = static_cast<int>(parse_int(fields[6]));
      row.replans = static_cast<int>(parse_int(fields[7]));
      row.dv_spent_total_km_s = parse_double(fields[8]);
      rows.push_back(row);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("report CSV line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
  }
  return rows;
}

void write_summary(const std::vector<ModeSummary>& summary, std::ostream& out) {
  out << "mode,avg,max,min\n";
  for (const ModeSummary& s : summary) {
    out << mode_label(s.mode) << ',' << format_double(s.avg_debris_visited) << ','
        << s.max_debris_visited << ',' << s.min_debris_visited << '\n';
  }
}

}  // namespace adr
