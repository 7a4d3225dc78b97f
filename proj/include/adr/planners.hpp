#pragma once

#include <vector>

#include "adr/env.hpp"
#include "adr/rng.hpp"

namespace adr {

/// Greedy sequencer: the unvisited debris with the lowest Hohmann delta-v
/// from the current radius, ties broken by lowest id. Refuels opportunistically
/// when eligible and the cheapest remaining transfer exceeds the remaining
/// fuel budget. Throws std::logic_error on a terminal or pending state or
/// when no unvisited debris remains.
Action greedy_min_dv(const Environment& env, const MissionState& state);

/// Greedy CA handler: of the two detour directions, the certified one with
/// the smaller time of flight (ties go Above). If only one direction
/// certifies, that one; if neither does, the direction whose ladder came
/// closest to clearing (the environment then scores the collision). Throws
/// std::logic_error without a pending target.
Action greedy_ca_min_time(const Environment& env, const MissionState& state);

struct MCTSConfig {
  double exploration_constant = 1.5;
  int simulations_per_step = 200;
  int rollout_depth = 15;
  // Rollouts always take uniformly random valid actions.

  void validate() const;
};

/// Per-action statistics of the search root, for inspection and tests.
struct MCTSRootStats {
  std::vector<int> visit_counts;   // indexed by flat action encoding
  std::vector<double> mean_returns;
};

/// Plain UCT over an open-loop tree: nodes are action sequences, and every
/// simulation re-samples the stochastic transitions from the root with a
/// generator forked off `rng`, so chance outcomes are averaged rather than
/// memorized. Selection maximizes Q + c*sqrt(ln N / n); unvisited children
/// have infinite priority (lowest index first). Rollouts take uniformly
/// random valid actions to the configured depth and return cumulative
/// reward. The final choice is the most-visited root action, ties broken by
/// higher mean return, then lower index. Deterministic given the rng state.
Action mcts_select_action(const Environment& env, const MissionState& state,
                          const MCTSConfig& config, SplitMix64& rng,
                          MCTSRootStats* stats = nullptr);

/// Exhaustive-search result over a deterministic small instance.
struct OracleResult {
  std::vector<Action> sequence;  // maximum-return plan, min delta-v then
                                 // lexicographic among ties
  double best_return = 0.0;
  double total_delta_v_km_s = 0.0;
  /// Every first action from which some continuation attains best_return.
  std::vector<Action> optimal_first_actions;
};

/// Enumerates every visitation order and refuel insertion from a fresh
/// episode. Requires n_debris <= 8 and collision_probability == 0; refuses
/// otherwise with std::invalid_argument.
OracleResult brute_force_oracle(const Environment& env);

}  // namespace adr
