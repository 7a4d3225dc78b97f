#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adr/env.hpp"
#include "adr/ppo.hpp"
#include "adr/scenario.hpp"

namespace adr {

/// Evaluation protocol: who sequences debris/refuel actions x who handles a
/// pending collision alert (Above/Below choice).
enum class EvaluationMode {
  RL_RL,          // policy sequences and avoids
  RL_Greedy,      // policy sequences, greedy min-time avoidance
  Greedy_RL,      // greedy min-dv sequencing, policy avoids
  Greedy_Greedy,  // fully heuristic baseline
};

/// Canonical lowercase-hyphen label, shared by CSV rows and CLI flags:
/// "rl-rl", "rl-greedy", "greedy-rl", "greedy-greedy".
std::string mode_label(EvaluationMode mode);

/// Inverse of mode_label; throws std::invalid_argument on unknown labels.
EvaluationMode parse_mode(const std::string& label);

/// True for the three modes that consult a policy network.
bool mode_needs_policy(EvaluationMode mode);

/// One evaluated episode (a test case x iteration x mode cell).
struct EvaluationRow {
  int case_id = 0;
  int iteration = 0;
  EvaluationMode mode = EvaluationMode::Greedy_Greedy;
  int debris_visited = 0;
  double mission_time_s = 0.0;  // elapsed time at termination (AMT numerator)
  bool collided = false;
  int refuel_events = 0;  // Refuel actions in the trace
  int replans = 0;        // CA actions in the trace
  double dv_spent_total_km_s = 0.0;

  bool operator==(const EvaluationRow& o) const = default;
};

/// Table-style aggregate of debris_visited over one mode's rows.
struct ModeSummary {
  EvaluationMode mode = EvaluationMode::Greedy_Greedy;
  double avg_debris_visited = 0.0;
  int max_debris_visited = 0;
  int min_debris_visited = 0;

  bool operator==(const ModeSummary& o) const = default;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;
  std::vector<ModeSummary> summary;

  bool operator==(const EvaluationReport& o) const = default;
};

/// Runs `iterations` episodes of one mode on one scenario. The episode seed
/// for iteration k is derived from (seed, k) only — never from the mode — so
/// the chance outcomes are paired across modes for a like-for-like
/// comparison. `policy` may be null for Greedy_Greedy; RL-bearing modes
/// throw std::invalid_argument without one (or with an incompatible one).
std::vector<EvaluationRow> run_mode(EvaluationMode mode, const Scenario& scenario,
                                    int iterations, const PolicyParameters* policy,
                                    std::uint64_t seed, int case_id = 0);

/// Per-mode summary rows in first-appearance order of the modes in `rows`.
std::vector<ModeSummary> summarize(const std::vector<EvaluationRow>& rows);

/// Full sweep: n_test_cases scenarios (derived from `seed`), every mode on
/// every case, rows emitted in (case, iteration, mode) order. Duplicate
/// modes are rejected.
EvaluationReport run_suite(const std::vector<EvaluationMode>& modes,
                           const MissionParams& params, int n_test_cases,
                           int iterations, const PolicyParameters* policy,
                           std::uint64_t seed);

/// Row CSV:
/// case_id,iteration,mode,debris_visited,mission_time_s,collided,refuels,
/// replans,dv_spent_total
void write_report_rows(const std::vector<EvaluationRow>& rows, std::ostream& out);

/// Parses write_report_rows output (field-exact round trip).
std::vector<EvaluationRow> read_report_rows(std::istream& in);

/// Summary CSV: mode,avg,max,min
void write_summary(const std::vector<ModeSummary>& summary, std::ostream& out);

}  // namespace adr
