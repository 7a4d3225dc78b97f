#include "adr/planners.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

#include "adr/astro.hpp"

namespace adr {

Action greedy_min_dv(const Environment& env, const MissionState& state) {
  if (state.terminal) {
    throw std::logic_error("greedy_min_dv called on a terminal state");
  }
  if (state.pending_target.has_value()) {
    throw std::logic_error("greedy_min_dv called with a CA decision pending");
  }

  int best_id = -1;
  double best_dv = std::numeric_limits<double>::infinity();
  for (int i = 0; i < env.n_debris(); ++i) {
    if (state.visited_mask[i]) continue;
    const double dv =
        astro::hohmann_plan(state.current_radius_km, env.debris_radius_km(i))
            .delta_v_total_km_s;
    if (dv < best_dv) {
      best_dv = dv;
      best_id = i;
    }
  }
  if (best_id < 0) {
    throw std::logic_error("greedy_min_dv found no unvisited debris");
  }

  const double budget_km_s = state.fuel * env.scenario().params.max_delta_v_km_s;
  if (state.refuel_eligible && best_dv > budget_km_s) {
    return Action::refuel();
  }
  return Action::debris(best_id);
}

Action greedy_ca_min_time(const Environment& env, const MissionState& state) {
  if (!state.pending_target.has_value()) {
    throw std::logic_error("greedy_ca_min_time requires a pending target");
  }
  const int target = *state.pending_target;
  const std::vector<std::uint8_t> mask = env.action_mask(state);
  if (!mask[Action::ca_below(target).encode(env.n_debris())]) {
    // The whole Below ladder is under the altitude floor.
    return Action::ca_above(target);
  }

  const CaSearch above = env.search_ca(state, astro::CaDirection::Above);
  const CaSearch below = env.search_ca(state, astro::CaDirection::Below);

  if (above.certified.has_value() && below.certified.has_value()) {
    return below.certified->plan.time_of_flight_s <
                   above.certified->plan.time_of_flight_s
               ? Action::ca_below(target)
               : Action::ca_above(target);
  }
  if (above.certified.has_value()) return Action::ca_above(target);
  if (below.certified.has_value()) return Action::ca_below(target);
  // Neither clears: pick the near miss and let the env score the collision.
  return below.best_clearance_km > above.best_clearance_km
             ? Action::ca_below(target)
             : Action::ca_above(target);
}

void MCTSConfig::validate() const {
  if (!(exploration_constant >= 0.0) || !std::isfinite(exploration_constant)) {
    throw std::invalid_argument("exploration_constant must be finite and >= 0");
  }
  if (simulations_per_step <= 0) {
    throw std::invalid_argument("simulations_per_step must be positive");
  }
  if (rollout_depth <= 0) {
    throw std::invalid_argument("rollout_depth must be positive");
  }
}

namespace {

struct EdgeStats {
  int visits = 0;
  double total_return = 0.0;
};

struct SearchNode {
  int visits = 0;
  std::map<int, EdgeStats> edges;
  std::map<int, std::unique_ptr<SearchNode>> children;
};

std::vector<int> valid_indices(const std::vector<std::uint8_t>& mask) {
  std::vector<int> valid;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) valid.push_back(i);
  }
  return valid;
}

/// Cumulative reward of a uniformly random continuation.
double rollout(const Environment& env, MissionState& state, int depth,
               SplitMix64& policy_rng) {
  double total = 0.0;
  for (int d = 0; d < depth && !state.terminal; ++d) {
    const std::vector<int> valid = valid_indices(env.action_mask(state));
    const int pick = valid[policy_rng.uniform_index(valid.size())];
    total += env.step(state, Action::decode(pick, env.n_debris())).reward;
  }
  return total;
}

}  // namespace

Action mcts_select_action(const Environment& env, const MissionState& state,
                          const MCTSConfig& config, SplitMix64& rng,
                          MCTSRootStats* stats) {
  config.validate();
  if (state.terminal) {
    throw std::logic_error("mcts_select_action called on a terminal state");
  }
  const int n = env.n_debris();
  const std::vector<int> root_valid = valid_indices(env.action_mask(state));
  if (root_valid.size() == 1) {
    if (stats) {
      stats->visit_counts.assign(env.action_count(), 0);
      stats->mean_returns.assign(env.action_count(), 0.0);
    }
    return Action::decode(root_valid[0], n);
  }

  MissionState base = state;
  base.trace.clear();

  SearchNode root;
  for (int sim = 0; sim < config.simulations_per_step; ++sim) {
    MissionState sim_state = base;
    sim_state.rng = SplitMix64(rng.next_u64());
    SplitMix64 policy_rng(rng.next_u64());

    SearchNode* node = &root;
    std::vector<std::pair<SearchNode*, int>> path;
    std::vector<double> rewards;
    double tail_return = 0.0;

    while (!sim_state.terminal) {
      const std::vector<int> valid = valid_indices(env.action_mask(sim_state));

      int pick = -1;
      for (int a : valid) {  // unvisited children first, lowest index
        const auto it = node->edges.find(a);
        if (it == node->edges.end() || it->second.visits == 0) {
          pick = a;
          break;
        }
      }
      const bool expanding = pick >= 0;
      if (!expanding) {
        double best_score = -std::numeric_limits<double>::infinity();
        for (int a : valid) {
          const EdgeStats& edge = node->edges.at(a);
          const double score =
              edge.total_return / edge.visits +
              config.exploration_constant *
                  std::sqrt(std::log(static_cast<double>(node->visits)) / edge.visits);
          if (score > best_score) {
            best_score = score;
            pick = a;
          }
        }
      }

      const StepOutcome outcome = env.step(sim_state, Action::decode(pick, n));
      path.emplace_back(node, pick);
      rewards.push_back(outcome.reward);

      std::unique_ptr<SearchNode>& child = node->children[pick];
      if (!child) child = std::make_unique<SearchNode>();
      node = child.get();

      if (expanding) {
        tail_return = rollout(env, sim_state, config.rollout_depth, policy_rng);
        break;
      }
    }

    double value = tail_return;
    for (int i = static_cast<int>(path.size()) - 1; i >= 0; --i) {
      value += rewards[i];
      EdgeStats& edge = path[i].first->edges[path[i].second];
      edge.visits += 1;
      edge.total_return += value;
      path[i].first->visits += 1;
    }
  }

  if (stats) {
    stats->visit_counts.assign(env.action_count(), 0);
    stats->mean_returns.assign(env.action_count(), 0.0);
    for (const auto& [a, edge] : root.edges) {
      stats->visit_counts[a] = edge.visits;
      stats->mean_returns[a] = edge.visits > 0 ? edge.total_return / edge.visits : 0.0;
    }
  }

  // Most visited root action; ties -> higher mean return -> lower index.
  int best = -1;
  int best_visits = -1;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int a : root_valid) {
    const auto it = root.edges.find(a);
    if (it == root.edges.end()) continue;
    const int visits = it->second.visits;
    const double q = visits > 0 ? it->second.total_return / visits : 0.0;
    if (visits > best_visits || (visits == best_visits && q > best_q)) {
      best = a;
      best_visits = visits;
      best_q = q;
    }
  }
  if (best < 0) {
    // Cannot happen with positive simulation counts, but keep a total order.
    best = root_valid.front();
  }
  return Action::decode(best, n);
}

namespace {

struct OracleBest {
  double best_return = -std::numeric_limits<double>::infinity();
  double total_dv = std::numeric_limits<double>::infinity();
  std::vector<int> sequence;
};

/// Depth-first enumeration in ascending action-index order, so the first
/// strict improvement encountered is also the lexicographically smallest
/// plan among equals.
void oracle_dfs(const Environment& env, const MissionState& state,
                std::vector<int>& prefix, double return_so_far, double dv_so_far,
                OracleBest& best) {
  if (state.terminal) {
    if (return_so_far > best.best_return ||
        (return_so_far == best.best_return && dv_so_far < best.total_dv)) {
      best.best_return = return_so_far;
      best.total_dv = dv_so_far;
      best.sequence = prefix;
    }
    return;
  }
  const std::vector<std::uint8_t> mask = env.action_mask(state);
  for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
    if (!mask[a]) continue;
    MissionState child = state;
    child.trace.clear();
    const StepOutcome outcome = env.step(child, Action::decode(a, env.n_debris()));
    prefix.push_back(a);
    oracle_dfs(env, child, prefix, return_so_far + outcome.reward,
               dv_so_far + outcome.info.dv_spent_km_s, best);
    prefix.pop_back();
  }
}

}  // namespace

OracleResult brute_force_oracle(const Environment& env) {
  if (env.n_debris() > 8) {
    throw std::invalid_argument("brute_force_oracle supports at most 8 debris");
  }
  if (env.scenario().params.collision_probability != 0.0) {
    throw std::invalid_argument(
        "brute_force_oracle requires collision_probability = 0");
  }

  const MissionState initial = env.reset(0);
  const std::vector<std::uint8_t> mask = env.action_mask(initial);

  OracleBest best;
  std::vector<double> first_action_returns(env.action_count(),
                                           -std::numeric_limits<double>::infinity());
  for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
    if (!mask[a]) continue;
    MissionState child = initial;
    child.trace.clear();
    const StepOutcome outcome = env.step(child, Action::decode(a, env.n_debris()));

    OracleBest sub;
    std::vector<int> prefix{a};
    oracle_dfs(env, child, prefix, outcome.reward, outcome.info.dv_spent_km_s, sub);
    first_action_returns[a] = sub.best_return;
    if (sub.best_return > best.best_return ||
        (sub.best_return == best.best_return && sub.total_dv < best.total_dv)) {
      best = sub;
    }
  }

  OracleResult result;
  result.best_return = best.best_return;
  result.total_delta_v_km_s = best.total_dv;
  for (int a : best.sequence) {
    result.sequence.push_back(Action::decode(a, env.n_debris()));
  }
  for (int a = 0; a < env.action_count(); ++a) {
    if (first_action_returns[a] == best.best_return) {
      result.optimal_first_actions.push_back(Action::decode(a, env.n_debris()));
    }
  }
  return result;
}

}  // namespace adr
