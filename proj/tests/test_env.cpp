#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "adr/astro.hpp"
#include "adr/constants.hpp"
#include "adr/env.hpp"
#include "adr/rng.hpp"
#include "adr/scenario.hpp"

using namespace adr;

namespace {

MissionParams small_params(int n, double p) {
  MissionParams params;
  params.n_debris = n;
  params.collision_probability = p;
  return params;
}

Scenario make_scenario(std::uint64_t seed, int n, double p) {
  return generate_scenario(seed, small_params(n, p));
}

/// Uniformly random valid action under the mask.
Action sample_valid_action(const std::vector<std::uint8_t>& mask, int n, SplitMix64& rng) {
  std::vector<int> valid;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) valid.push_back(i);
  }
  REQUIRE(!valid.empty());
  return Action::decode(valid[rng.uniform_index(valid.size())], n);
}

}  // namespace

TEST_CASE("action encoding round-trips over the whole flat range") {
  const int n = 5;
  for (int index = 0; index <= 3 * n; ++index) {
    const Action a = Action::decode(index, n);
    CHECK(a.encode(n) == index);
  }
  CHECK(Action::debris(3).encode(n) == 3);
  CHECK(Action::refuel().encode(n) == 5);
  CHECK(Action::ca_above(0).encode(n) == 6);
  CHECK(Action::ca_below(4).encode(n) == 15);
  CHECK_THROWS_AS(Action::decode(-1, n), std::logic_error);
  CHECK_THROWS_AS(Action::decode(3 * n + 1, n), std::logic_error);
  CHECK_THROWS_AS(Action::debris(5).encode(n), std::logic_error);
  CHECK_THROWS_AS(Action::ca_above(-1).encode(n), std::logic_error);
}

TEST_CASE("action labels match the trace style") {
  CHECK(Action::debris(7).label() == "DEBRIS_7");
  CHECK(Action::refuel().label() == "Refuel");
  CHECK(Action::ca_above(12).label() == "CA_ABOVE_DEBRIS_12");
  CHECK(Action::ca_below(0).label() == "CA_BELOW_DEBRIS_0");
}

TEST_CASE("arc_intersects_zone uses the closed cuboid boundary") {
  const CollisionZone zone{{100.0, -50.0, 20.0}, {2.5, 2.5, 2.5}};

  const std::vector<Vec3> at_center{zone.center_km};
  CHECK(arc_intersects_zone(at_center, zone));

  const std::vector<Vec3> outside{{100.0 + 7.5, -50.0, 20.0}, {100.0, -50.0 - 8.0, 20.0}};
  CHECK_FALSE(arc_intersects_zone(outside, zone));

  // A point exactly on a face counts as inside.
  const std::vector<Vec3> on_face{{102.5, -50.0, 20.0}};
  CHECK(arc_intersects_zone(on_face, zone));
}

TEST_CASE("min_clearance_km measures signed distance to the cuboid surface") {
  const CollisionZone zone{{0.0, 0.0, 0.0}, {2.5, 2.5, 2.5}};

  const std::vector<Vec3> center{{0.0, 0.0, 0.0}};
  CHECK(min_clearance_km(center, zone) == -2.5);

  const std::vector<Vec3> axis{{7.5, 0.0, 0.0}};
  CHECK(min_clearance_km(axis, zone) == 5.0);

  // Off-axis: closest feature is an edge, sqrt(5^2 + 5^2).
  const std::vector<Vec3> edge{{7.5, 7.5, 2.0}};
  CHECK(min_clearance_km(edge, zone) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));

  // Inside but off-center: distance to the nearest face.
  const std::vector<Vec3> inside{{1.0, 0.5, -0.25}};
  CHECK(min_clearance_km(inside, zone) == -1.5);

  // The minimum over a mixed list is the worst point.
  const std::vector<Vec3> mixed{{7.5, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  CHECK(min_clearance_km(mixed, zone) == -2.5);

  const std::vector<Vec3> empty;
  CHECK_THROWS_AS(min_clearance_km(empty, zone), std::logic_error);
}

TEST_CASE("spawn_zone centers on an interior sample and always hits the arc") {
  const MissionParams params = small_params(3, 0.5);
  SplitMix64 rng(99);

  std::vector<Vec3> arc;
  for (int i = 0; i < 40; ++i) {
    arc.push_back({7000.0 + 10.0 * i, 3.0 * i, -2.0 * i});
  }
  for (int trial = 0; trial < 200; ++trial) {
    const CollisionZone zone = spawn_zone(rng, arc, params);
    CHECK(zone.half_extents_km == params.zone_half_extents_km);
    CHECK(arc_intersects_zone(arc, zone));
    // Interior only: never centered on either endpoint.
    CHECK(zone.center_km != arc.front());
    CHECK(zone.center_km != arc.back());
  }

  // Degenerate two-point arc: centered at the midpoint of the endpoints.
  const std::vector<Vec3> two{{0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}};
  const CollisionZone mid = spawn_zone(rng, two, params);
  CHECK(mid.center_km == Vec3{5.0, 0.0, 0.0});
}

TEST_CASE("reset starts fully fueled at the parking orbit") {
  const Scenario scenario = make_scenario(42, 50, 1.0 / 3.0);
  const Environment env(scenario);
  CHECK(env.observation_size() == 8 * 50 + 5);

  const MissionState state = env.reset(7);
  CHECK(state.fuel == 1.0);
  CHECK(state.elapsed_s == 0.0);
  CHECK(state.visited_count() == 0);
  CHECK_FALSE(state.refuel_eligible);
  CHECK_FALSE(state.pending_target.has_value());
  CHECK_FALSE(state.active_zone.has_value());

  const std::vector<double> obs = env.observe(state);
  REQUIRE(static_cast<int>(obs.size()) == env.observation_size());
  CHECK(obs[0] == 1.0);  // fuel
  CHECK(obs[1] == 1.0);  // remaining-time fraction
  // 700 km altitude maps to exactly 0 on the [700, 800] shell.
  CHECK(obs[2] == 0.0);
  for (int i = 0; i < 50; ++i) {
    CHECK(obs[3 + i] == 0.0);  // visited mask
    CHECK(obs[3 + 50 + 6 * 50 + 2 + i] == 0.0);  // risk flags
  }
  CHECK(obs[3 + 50 + 6 * 50] == 0.0);  // refuel_eligible
  CHECK(obs[3 + 50 + 6 * 50 + 1] == 0.0);  // distance to refuel orbit

  // Determinism: equal seeds give identical states and observations.
  const MissionState again = env.reset(7);
  CHECK(again == state);
  CHECK(env.observe(again) == obs);
}

TEST_CASE("fresh mask offers exactly the debris actions") {
  const Scenario scenario = make_scenario(11, 50, 1.0 / 3.0);
  const Environment env(scenario);
  const MissionState state = env.reset(1);

  const std::vector<std::uint8_t> mask = env.action_mask(state);
  REQUIRE(static_cast<int>(mask.size()) == 3 * 50 + 1);
  int valid = 0;
  for (std::uint8_t bit : mask) valid += bit;
  CHECK(valid == 50);
  for (int i = 0; i < 50; ++i) CHECK(mask[i] == 1);
  CHECK(mask[50] == 0);  // refuel gated until first visit
  for (int i = 51; i <= 3 * 50; ++i) CHECK(mask[i] == 0);
}

TEST_CASE("debris step without a trigger flies the oriented Hohmann plan") {
  const Scenario scenario = make_scenario(5151, 4, 0.0);
  const Environment env(scenario);
  MissionState state = env.reset(3);

  const astro::TransferPlan plan = env.oriented_plan(state, env.debris_radius_km(2));
  const StepOutcome outcome = env.step(state, Action::debris(2));

  CHECK(outcome.reward == 1.0);
  CHECK_FALSE(outcome.terminal);
  CHECK(outcome.reason == TerminationReason::None);
  CHECK(outcome.info.dv_spent_km_s == plan.delta_v_total_km_s);
  CHECK(outcome.info.tof_s == plan.time_of_flight_s);
  CHECK_FALSE(outcome.info.replanned);
  CHECK_FALSE(outcome.info.refueled);

  CHECK(state.visited_mask[2] == 1);
  CHECK(state.visited_count() == 1);
  CHECK(state.refuel_eligible);
  CHECK(state.current_radius_km == env.debris_radius_km(2));
  CHECK(state.elapsed_s == plan.time_of_flight_s);
  CHECK(state.fuel ==
        1.0 - plan.delta_v_total_km_s / scenario.params.max_delta_v_km_s);
  CHECK(state.dv_spent_total_km_s == plan.delta_v_total_km_s);

  const std::vector<double> obs = env.observe(state);
  CHECK(obs[0] < 1.0);
  CHECK(obs[3 + 2] == 1.0);

  // Re-selecting a visited debris is rejected.
  CHECK_THROWS_AS(env.step(state, Action::debris(2)), std::logic_error);
}

TEST_CASE("terminal states refuse mask and step calls") {
  const Scenario scenario = make_scenario(9, 1, 0.0);
  const Environment env(scenario);
  MissionState state = env.reset(5);

  const StepOutcome outcome = env.step(state, Action::debris(0));
  CHECK(outcome.terminal);
  CHECK(outcome.reason == TerminationReason::AllVisited);
  CHECK(outcome.reward == 1.0);
  CHECK(state.terminal);
  CHECK_THROWS_AS(env.action_mask(state), std::logic_error);
  CHECK_THROWS_AS(env.step(state, Action::refuel()), std::logic_error);
}

TEST_CASE("a triggered zone blocks the transfer and forces a CA decision") {
  const Scenario scenario = make_scenario(2024, 6, 1.0);
  const Environment env(scenario);
  MissionState state = env.reset(12);
  const MissionState before = state;

  // Nominal arc recomputed the same way the env does internally.
  const astro::TransferPlan nominal = env.oriented_plan(state, env.debris_radius_km(3));
  const std::vector<Vec3> arc =
      astro::transfer_arc_points(nominal, scenario.params.sample_interval_s);

  const StepOutcome outcome = env.step(state, Action::debris(3));
  CHECK(outcome.reward == 0.0);
  CHECK_FALSE(outcome.terminal);
  CHECK(outcome.info.dv_spent_km_s == 0.0);
  CHECK(outcome.info.tof_s == 0.0);

  // No motion, no cost.
  CHECK(state.current_radius_km == before.current_radius_km);
  CHECK(state.current_anomaly_rad == before.current_anomaly_rad);
  CHECK(state.fuel == 1.0);
  CHECK(state.elapsed_s == 0.0);
  CHECK(state.visited_count() == 0);

  REQUIRE(state.pending_target.has_value());
  CHECK(*state.pending_target == 3);
  REQUIRE(state.active_zone.has_value());
  CHECK(state.active_zone->half_extents_km == scenario.params.zone_half_extents_km);
  CHECK(arc_intersects_zone(arc, *state.active_zone));

  // Mask narrows to the two CA actions for the pending target.
  const std::vector<std::uint8_t> mask = env.action_mask(state);
  int valid = 0;
  for (std::uint8_t bit : mask) valid += bit;
  CHECK(valid == 2);
  CHECK(mask[Action::ca_above(3).encode(6)] == 1);
  CHECK(mask[Action::ca_below(3).encode(6)] == 1);
  CHECK_THROWS_AS(env.step(state, Action::debris(0)), std::logic_error);
  CHECK_THROWS_AS(env.step(state, Action::refuel()), std::logic_error);

  // Risk flag set for the pending debris only.
  const std::vector<double> obs = env.observe(state);
  for (int i = 0; i < 6; ++i) {
    CHECK(obs[3 + 6 + 6 * 6 + 2 + i] == (i == 3 ? 1.0 : 0.0));
  }

  // The trace records the blocked selection.
  REQUIRE(state.trace.size() == 1);
  CHECK(state.trace[0].zone_triggered);
  CHECK(state.trace[0].action == Action::debris(3));
}

TEST_CASE("a certified detour is flown with the ladder's smallest qualifying rung") {
  const Scenario scenario = make_scenario(31337, 5, 0.0);
  const Environment env(scenario);
  MissionState state = env.reset(2);

  // Construct the pending state directly with a mid-arc zone, where a small
  // detour certifies.
  const astro::TransferPlan nominal = env.oriented_plan(state, env.debris_radius_km(1));
  const std::vector<Vec3> arc =
      astro::transfer_arc_points(nominal, scenario.params.sample_interval_s);
  REQUIRE(arc.size() >= 5);
  state.pending_target = 1;
  state.active_zone = CollisionZone{arc[arc.size() / 2], scenario.params.zone_half_extents_km};

  const CaSearch above = env.search_ca(state, astro::CaDirection::Above);
  REQUIRE(above.certified.has_value());
  CHECK(above.certified->min_clearance_km >= scenario.params.clearance_km);
  CHECK(above.certified->delta_r_km >= Environment::kCaLadderStepKm);
  CHECK(above.certified->delta_r_km <= Environment::kCaLadderMaxKm);
  // Smallest qualifying rung: every smaller rung fails certification.
  for (double dr = Environment::kCaLadderStepKm; dr < above.certified->delta_r_km;
       dr += Environment::kCaLadderStepKm) {
    astro::TransferPlan plan = astro::ca_adjusted_plan(
        state.current_radius_km, env.debris_radius_km(1), dr, astro::CaDirection::Above);
    plan.departure_latitude_rad = state.current_anomaly_rad;
    plan.plane = nominal.plane;
    const std::vector<Vec3> detour_arc =
        astro::transfer_arc_points(plan, scenario.params.sample_interval_s);
    CHECK(min_clearance_km(detour_arc, *state.active_zone) < scenario.params.clearance_km);
  }

  const astro::TransferPlan& plan = above.certified->plan;
  const StepOutcome outcome = env.step(state, Action::ca_above(1));
  CHECK(outcome.reward == 1.0);
  CHECK(outcome.info.replanned);
  CHECK(outcome.info.ca_delta_r_km == above.certified->delta_r_km);
  CHECK(outcome.info.dv_spent_km_s == plan.delta_v_total_km_s);
  CHECK(outcome.info.tof_s == plan.time_of_flight_s);

  CHECK(state.visited_mask[1] == 1);
  CHECK(state.refuel_eligible);
  CHECK_FALSE(state.pending_target.has_value());
  CHECK_FALSE(state.active_zone.has_value());
  // The craft closes out at the debris radius, not the detour apsis.
  CHECK(state.current_radius_km == env.debris_radius_km(1));
  CHECK(state.fuel == 1.0 - plan.delta_v_total_km_s / scenario.params.max_delta_v_km_s);

  // A detour always costs more than the nominal plan it replaces.
  CHECK(plan.delta_v_total_km_s > nominal.delta_v_total_km_s);
}

TEST_CASE("an uncertifiable ladder in the chosen direction is a collision") {
  MissionParams params = small_params(3, 0.0);
  params.zone_half_extents_km = {120.0, 120.0, 120.0};
  const Scenario scenario = generate_scenario(5, params);
  const Environment env(scenario);
  MissionState state = env.reset(8);

  const astro::TransferPlan nominal = env.oriented_plan(state, env.debris_radius_km(0));
  const std::vector<Vec3> arc =
      astro::transfer_arc_points(nominal, scenario.params.sample_interval_s);
  state.pending_target = 0;
  state.active_zone = CollisionZone{arc[arc.size() / 2], params.zone_half_extents_km};

  // The whole ladder tops out at 50 km; a 120 km half-extent zone on the arc
  // cannot be cleared by 5 km in either direction.
  const CaSearch above = env.search_ca(state, astro::CaDirection::Above);
  CHECK_FALSE(above.certified.has_value());
  CHECK(above.best_clearance_km < scenario.params.clearance_km);

  const MissionState before = state;
  const StepOutcome outcome = env.step(state, Action::ca_above(0));
  CHECK(outcome.reward == -1.0);
  CHECK(outcome.terminal);
  CHECK(outcome.reason == TerminationReason::Collision);
  CHECK(outcome.info.dv_spent_km_s == 0.0);
  CHECK_FALSE(outcome.info.replanned);

  // The failed maneuver is not flown: no motion, no cost, no visit credit.
  CHECK(state.fuel == before.fuel);
  CHECK(state.elapsed_s == before.elapsed_s);
  CHECK(state.current_radius_km == before.current_radius_km);
  CHECK(state.visited_count() == 0);
  CHECK(state.terminal);
  CHECK(state.reason == TerminationReason::Collision);
  // The blocking zone stays frozen in the terminal state.
  CHECK(state.pending_target.has_value());
  CHECK(state.active_zone.has_value());
}

TEST_CASE("refuel restores the tank after a real transfer plus service time") {
  const Scenario scenario = make_scenario(77, 3, 0.0);
  const Environment env(scenario);
  MissionState state = env.reset(4);

  // Refuel is invalid before any visit.
  CHECK(env.action_mask(state)[Action::refuel().encode(3)] == 0);
  CHECK_THROWS_AS(env.step(state, Action::refuel()), std::logic_error);

  const StepOutcome visit = env.step(state, Action::debris(1));
  CHECK(visit.reward == 1.0);
  const double elapsed_after_visit = state.elapsed_s;
  CHECK(env.action_mask(state)[Action::refuel().encode(3)] == 1);

  const astro::TransferPlan back = env.oriented_plan(state, env.refuel_radius_km());
  const StepOutcome refuel = env.step(state, Action::refuel());
  CHECK(refuel.reward == 0.0);
  CHECK_FALSE(refuel.terminal);
  CHECK(refuel.info.refueled);
  CHECK_FALSE(refuel.info.replanned);
  CHECK(refuel.info.dv_spent_km_s == back.delta_v_total_km_s);
  CHECK(refuel.info.tof_s ==
        back.time_of_flight_s + scenario.params.refuel_service_penalty_s);

  CHECK(state.fuel == 1.0);
  CHECK_FALSE(state.refuel_eligible);
  CHECK(state.current_radius_km == env.refuel_radius_km());
  CHECK(state.elapsed_s == elapsed_after_visit + back.time_of_flight_s +
                               scenario.params.refuel_service_penalty_s);

  // Not twice without an intervening visit.
  CHECK(env.action_mask(state)[Action::refuel().encode(3)] == 0);
  CHECK_THROWS_AS(env.step(state, Action::refuel()), std::logic_error);
  env.step(state, Action::debris(0));
  CHECK(env.action_mask(state)[Action::refuel().encode(3)] == 1);
}

TEST_CASE("fuel exhaustion on a visiting step nets to zero reward") {
  MissionParams params = small_params(2, 0.0);
  params.max_delta_v_km_s = 1e-4;  // any real transfer overdraws the tank
  const Scenario scenario = generate_scenario(21, params);
  const Environment env(scenario);
  MissionState state = env.reset(1);

  const StepOutcome outcome = env.step(state, Action::debris(0));
  CHECK(outcome.reward == 0.0);  // +1 visit, -1 T_penalty
  CHECK(outcome.terminal);
  CHECK(outcome.reason == TerminationReason::FuelExhausted);
  CHECK(state.fuel < 0.0);
  CHECK(state.visited_mask[0] == 1);  // the visit credit still applies
}

TEST_CASE("fuel exhaustion on the way to refuel skips the service") {
  MissionParams params = small_params(2, 0.0);
  const Scenario probe_scenario = generate_scenario(33, params);
  const Environment probe(probe_scenario);
  MissionState probe_state = probe.reset(2);
  const double dv_out =
      probe.oriented_plan(probe_state, probe.debris_radius_km(0)).delta_v_total_km_s;

  // Tank sized so the outbound leg fits but the return leg does not.
  params.max_delta_v_km_s = dv_out / 0.95;
  const Scenario scenario = generate_scenario(33, params);
  const Environment env(scenario);
  MissionState state = env.reset(2);

  const StepOutcome visit = env.step(state, Action::debris(0));
  CHECK(visit.reward == 1.0);
  CHECK_FALSE(visit.terminal);

  const StepOutcome refuel = env.step(state, Action::refuel());
  CHECK(refuel.reward == -1.0);
  CHECK(refuel.terminal);
  CHECK(refuel.reason == TerminationReason::FuelExhausted);
  CHECK_FALSE(refuel.info.refueled);
  CHECK(state.fuel < 0.0);  // the tank was not restored
}

TEST_CASE("time exhaustion is strict exceedance after the full maneuver") {
  MissionParams params = small_params(2, 0.0);
  const Scenario probe_scenario = generate_scenario(64, params);
  const Environment probe(probe_scenario);
  MissionState probe_state = probe.reset(3);
  const double tof0 =
      probe.oriented_plan(probe_state, probe.debris_radius_km(0)).time_of_flight_s;

  // Budget exactly one transfer: elapsed == max is not exhaustion.
  params.max_duration_s = tof0;
  const Scenario scenario = generate_scenario(64, params);
  const Environment env(scenario);
  MissionState state = env.reset(3);

  const StepOutcome first = env.step(state, Action::debris(0));
  CHECK(first.reward == 1.0);
  CHECK_FALSE(first.terminal);
  CHECK(state.elapsed_s == params.max_duration_s);

  const StepOutcome second = env.step(state, Action::debris(1));
  CHECK(second.reward == 0.0);  // +1 visit, -1 T_penalty
  CHECK(second.terminal);
  CHECK(second.reason == TerminationReason::TimeExhausted);
}

TEST_CASE("random episodes satisfy the fuel ledger and accounting identities") {
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    const Scenario scenario = make_scenario(derive_seed(404, trial), 6, 0.5);
    const Environment env(scenario);
    MissionState state = env.reset(derive_seed(405, trial));
    SplitMix64 policy_rng(derive_seed(406, trial));

    double dv_since_refuel = 0.0;
    double episode_return = 0.0;
    int collisions = 0;
    bool exhausted = false;

    for (int step = 0; step < 100 && !state.terminal; ++step) {
      CHECK(state.elapsed_s <= scenario.params.max_duration_s);
      CHECK(state.pending_target.has_value() == state.active_zone.has_value());

      const std::vector<double> obs = env.observe(state);
      CHECK(static_cast<int>(obs.size()) == env.observation_size());
      for (double component : obs) {
        CHECK(component >= 0.0);
        CHECK(component <= 1.0);
      }

      const std::vector<std::uint8_t> mask = env.action_mask(state);
      // Mask soundness: the first invalid index always raises.
      for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
        if (!mask[i]) {
          MissionState copy = state;
          CHECK_THROWS_AS(env.step(copy, Action::decode(i, 6)), std::logic_error);
          break;
        }
      }

      const Action action = sample_valid_action(mask, 6, policy_rng);
      const StepOutcome outcome = env.step(state, action);
      episode_return += outcome.reward;

      if (outcome.info.refueled) {
        dv_since_refuel = 0.0;
        CHECK(state.fuel == 1.0);
      } else {
        dv_since_refuel += outcome.info.dv_spent_km_s;
      }
      CHECK(std::abs((1.0 - state.fuel) -
                     dv_since_refuel / scenario.params.max_delta_v_km_s) <= 1e-12);

      if (outcome.reason == TerminationReason::Collision) ++collisions;
      if (outcome.reason == TerminationReason::FuelExhausted ||
          outcome.reason == TerminationReason::TimeExhausted) {
        exhausted = true;
      }
    }
    REQUIRE(state.terminal);

    // Return telescopes to visits minus penalties.
    CHECK(episode_return ==
          state.visited_count() - collisions - (exhausted ? 1 : 0));
  }
}

TEST_CASE("identical seeds and actions replay bit-for-bit") {
  const Scenario scenario = make_scenario(888, 5, 1.0 / 3.0);
  const Environment env(scenario);

  auto run = [&]() {
    MissionState state = env.reset(1234);
    SplitMix64 policy_rng(555);
    while (!state.terminal) {
      const Action action = sample_valid_action(env.action_mask(state), 5, policy_rng);
      env.step(state, action);
    }
    return state;
  };

  const MissionState a = run();
  const MissionState b = run();
  CHECK(a == b);
  CHECK(a.trace == b.trace);

  MissionState c = env.reset(1235);
  CHECK_FALSE(c == env.reset(1234));
}

TEST_CASE("certified detours stay clear of the zone by the required margin") {
  int detours_checked = 0;
  for (std::uint64_t trial = 0; trial < 40 && detours_checked < 12; ++trial) {
    const Scenario scenario = make_scenario(derive_seed(700, trial), 5, 1.0);
    const Environment env(scenario);
    MissionState state = env.reset(derive_seed(701, trial));
    SplitMix64 policy_rng(derive_seed(702, trial));

    for (int step = 0; step < 40 && !state.terminal; ++step) {
      const Action action = sample_valid_action(env.action_mask(state), 5, policy_rng);
      if (action.kind == Action::Kind::CaAbove || action.kind == Action::Kind::CaBelow) {
        const astro::CaDirection direction = action.kind == Action::Kind::CaAbove
                                                 ? astro::CaDirection::Above
                                                 : astro::CaDirection::Below;
        const CaSearch search = env.search_ca(state, direction);
        const StepOutcome outcome = env.step(state, action);
        if (search.certified.has_value()) {
          CHECK(outcome.info.replanned);
          CHECK(search.certified->min_clearance_km >= scenario.params.clearance_km);
          CHECK(outcome.info.dv_spent_km_s ==
                search.certified->plan.delta_v_total_km_s);
          ++detours_checked;
        } else {
          CHECK(outcome.reason == TerminationReason::Collision);
        }
      } else {
        env.step(state, action);
      }
    }
  }
  CHECK(detours_checked >= 12);
}

TEST_CASE("zone triggers track the configured probability") {
  const Scenario scenario = make_scenario(2026, 1, 1.0 / 3.0);
  const Environment env(scenario);

  int triggers = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    MissionState state = env.reset(derive_seed(777, i));
    env.step(state, Action::debris(0));
    if (state.pending_target.has_value()) ++triggers;
  }
  const double frequency = static_cast<double>(triggers) / trials;
  CHECK(frequency > 1.0 / 3.0 - 0.01);
  CHECK(frequency < 1.0 / 3.0 + 0.01);
}

TEST_CASE("p = 0 episodes never spawn zones") {
  const Scenario scenario = make_scenario(3, 4, 0.0);
  const Environment env(scenario);
  MissionState state = env.reset(9);
  SplitMix64 policy_rng(10);
  while (!state.terminal) {
    CHECK_FALSE(state.pending_target.has_value());
    env.step(state, sample_valid_action(env.action_mask(state), 4, policy_rng));
  }
  CHECK(state.reason == TerminationReason::AllVisited);
  CHECK(state.visited_count() == 4);
}

TEST_CASE("episode log matches the documented CSV layout") {
  const Scenario scenario = make_scenario(606, 3, 0.0);
  const Environment env(scenario);
  MissionState state = env.reset(2);
  env.step(state, Action::debris(1));
  env.step(state, Action::refuel());
  env.step(state, Action::debris(0));
  env.step(state, Action::debris(2));
  REQUIRE(state.terminal);

  std::ostringstream out;
  write_episode_log(state, out);
  const std::string text = out.str();

  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);

  REQUIRE(rows.size() == state.trace.size() + 1);
  CHECK(rows[0] ==
        "step,action_label,dv_spent,tof_s,reward,fuel_after,elapsed_after,"
        "replanned,refueled,terminal_reason");
  CHECK(rows[1].substr(0, 11) == "0,DEBRIS_1,");
  CHECK(rows[2].substr(0, 9) == "1,Refuel,");
  CHECK(rows[4].find("AllVisited") != std::string::npos);
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    CHECK(rows[i].find("None") != std::string::npos);
  }
}
