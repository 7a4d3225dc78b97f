#include "adr/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "adr/constants.hpp"
#include "adr/util.hpp"

namespace adr {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// Argument of latitude of a (circular) orbit: angle from the ascending node.
double latitude_of(const astro::KeplerianElements& e) {
  return astro::wrap_angle(e.arg_perigee_rad + e.true_anomaly_rad);
}

}  // namespace

int Action::encode(int n_debris) const {
  switch (kind) {
    case Kind::Refuel:
      return n_debris;
    case Kind::Debris:
    case Kind::CaAbove:
    case Kind::CaBelow:
      break;
  }
  if (target < 0 || target >= n_debris) {
    throw std::logic_error("action target out of range");
  }
  switch (kind) {
    case Kind::Debris:
      return target;
    case Kind::CaAbove:
      return n_debris + 1 + target;
    case Kind::CaBelow:
      return 2 * n_debris + 1 + target;
    default:
      break;
  }
  throw std::logic_error("unreachable action kind");
}

Action Action::decode(int index, int n_debris) {
  if (index < 0 || index > 3 * n_debris) {
    throw std::logic_error("action index out of range");
  }
  if (index < n_debris) return debris(index);
  if (index == n_debris) return refuel();
  if (index <= 2 * n_debris) return ca_above(index - n_debris - 1);
  return ca_below(index - 2 * n_debris - 1);
}

std::string Action::label() const {
  switch (kind) {
    case Kind::Debris:
      return "DEBRIS_" + std::to_string(target);
    case Kind::Refuel:
      return "Refuel";
    case Kind::CaAbove:
      return "CA_ABOVE_DEBRIS_" + std::to_string(target);
    case Kind::CaBelow:
      return "CA_BELOW_DEBRIS_" + std::to_string(target);
  }
  throw std::logic_error("unreachable action kind");
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::None:
      return "None";
    case TerminationReason::AllVisited:
      return "AllVisited";
    case TerminationReason::FuelExhausted:
      return "FuelExhausted";
    case TerminationReason::TimeExhausted:
      return "TimeExhausted";
    case TerminationReason::Collision:
      return "Collision";
  }
  throw std::logic_error("unreachable termination reason");
}

int MissionState::visited_count() const {
  return static_cast<int>(std::count(visited_mask.begin(), visited_mask.end(), 1));
}

bool MissionState::all_visited() const {
  return visited_count() == static_cast<int>(visited_mask.size());
}

bool arc_intersects_zone(std::span<const Vec3> arc_points, const CollisionZone& zone) {
  for (const Vec3& p : arc_points) {
    const Vec3 d = p - zone.center_km;
    if (std::abs(d.x) <= zone.half_extents_km.x && std::abs(d.y) <= zone.half_extents_km.y &&
        std::abs(d.z) <= zone.half_extents_km.z) {
      return true;
    }
  }
  return false;
}

double min_clearance_km(std::span<const Vec3> arc_points, const CollisionZone& zone) {
  if (arc_points.empty()) {
    throw std::logic_error("min_clearance_km requires a non-empty arc");
  }
  double min_clearance = std::numeric_limits<double>::infinity();
  for (const Vec3& p : arc_points) {
    const Vec3 d = p - zone.center_km;
    const double ex = std::abs(d.x) - zone.half_extents_km.x;
    const double ey = std::abs(d.y) - zone.half_extents_km.y;
    const double ez = std::abs(d.z) - zone.half_extents_km.z;
    double clearance;
    if (ex <= 0.0 && ey <= 0.0 && ez <= 0.0) {
      // Inside: negative distance to the nearest face.
      clearance = std::max({ex, ey, ez});
    } else {
      const double ox = std::max(ex, 0.0);
      const double oy = std::max(ey, 0.0);
      const double oz = std::max(ez, 0.0);
      clearance = std::sqrt(ox * ox + oy * oy + oz * oz);
    }
    min_clearance = std::min(min_clearance, clearance);
  }
  return min_clearance;
}

CollisionZone spawn_zone(SplitMix64& rng, std::span<const Vec3> nominal_arc,
                         const MissionParams& params) {
  if (nominal_arc.empty()) {
    throw std::logic_error("spawn_zone requires a non-empty arc");
  }
  Vec3 center;
  if (nominal_arc.size() <= 2) {
    center = 0.5 * (nominal_arc.front() + nominal_arc.back());
  } else {
    const std::uint64_t interior = nominal_arc.size() - 2;
    center = nominal_arc[1 + rng.uniform_index(interior)];
  }
  return CollisionZone{center, params.zone_half_extents_km};
}

Environment::Environment(const Scenario& scenario) : scenario_(&scenario) {
  scenario.params.validate();
  const int n = scenario.params.n_debris;
  if (static_cast<int>(scenario.debris.size()) != n) {
    throw std::invalid_argument("scenario debris count does not match n_debris");
  }
  debris_by_id_.assign(n, -1);
  for (int i = 0; i < static_cast<int>(scenario.debris.size()); ++i) {
    const int id = scenario.debris[i].id;
    if (id < 0 || id >= n || debris_by_id_[id] != -1) {
      throw std::invalid_argument("scenario debris ids must be unique in [0, n)");
    }
    debris_by_id_[id] = i;
  }
  plane_ = astro::OrbitPlane{scenario.initial_orbit.inclination_rad,
                             scenario.initial_orbit.raan_rad};
  initial_latitude_rad_ = latitude_of(scenario.initial_orbit);
}

double Environment::debris_radius_km(int debris_id) const {
  if (debris_id < 0 || debris_id >= n_debris()) {
    throw std::logic_error("debris id out of range");
  }
  return scenario_->debris[debris_by_id_[debris_id]].elements.semi_major_axis_km;
}

const astro::KeplerianElements& Environment::debris_elements(int debris_id) const {
  if (debris_id < 0 || debris_id >= n_debris()) {
    throw std::logic_error("debris id out of range");
  }
  return scenario_->debris[debris_by_id_[debris_id]].elements;
}

double Environment::refuel_radius_km() const {
  return kEarthRadiusKm + scenario_->params.refuel_orbit_altitude_km;
}

MissionState Environment::reset(std::uint64_t episode_seed) const {
  MissionState state;
  state.elapsed_s = 0.0;
  state.fuel = 1.0;
  state.current_radius_km = scenario_->initial_orbit.semi_major_axis_km;
  state.current_anomaly_rad = initial_latitude_rad_;
  state.visited_mask.assign(n_debris(), 0);
  state.refuel_eligible = false;
  state.pending_target.reset();
  state.active_zone.reset();
  state.rng = SplitMix64(episode_seed);
  state.terminal = false;
  state.reason = TerminationReason::None;
  state.dv_spent_total_km_s = 0.0;
  state.trace.clear();
  return state;
}

std::vector<double> Environment::observe(const MissionState& state) const {
  const MissionParams& params = scenario_->params;
  const int n = n_debris();
  std::vector<double> obs;
  obs.reserve(observation_size());

  obs.push_back(clamp01(state.fuel));
  obs.push_back(clamp01((params.max_duration_s - state.elapsed_s) / params.max_duration_s));
  obs.push_back(clamp01((state.current_radius_km - kEarthRadiusKm - kShellFloorAltitudeKm) /
                        kShellThicknessKm));
  for (int i = 0; i < n; ++i) {
    obs.push_back(state.visited_mask[i] ? 1.0 : 0.0);
  }
  for (int i = 0; i < n; ++i) {
    const astro::KeplerianElements& e = debris_elements(i);
    obs.push_back(clamp01((e.semi_major_axis_km - kEarthRadiusKm - kShellFloorAltitudeKm) /
                          kShellThicknessKm));
    obs.push_back(clamp01(e.eccentricity));
    obs.push_back(clamp01(e.inclination_rad / kTwoPi));
    obs.push_back(clamp01(e.raan_rad / kTwoPi));
    obs.push_back(clamp01(e.arg_perigee_rad / kTwoPi));
    obs.push_back(clamp01(e.true_anomaly_rad / kTwoPi));
  }
  obs.push_back(state.refuel_eligible ? 1.0 : 0.0);
  obs.push_back(clamp01(std::abs(state.current_radius_km - refuel_radius_km()) /
                        kShellThicknessKm));
  for (int i = 0; i < n; ++i) {
    obs.push_back(state.pending_target == i ? 1.0 : 0.0);
  }
  return obs;
}

std::vector<std::uint8_t> Environment::action_mask(const MissionState& state) const {
  if (state.terminal) {
    throw std::logic_error("action_mask called on a terminal state");
  }
  const int n = n_debris();
  std::vector<std::uint8_t> mask(action_count(), 0);
  if (state.pending_target.has_value()) {
    const int i = *state.pending_target;
    mask[Action::ca_above(i).encode(n)] = 1;
    // Below is offered only when at least one ladder rung stays above the
    // altitude floor.
    if (debris_radius_km(i) - kCaLadderStepKm > kEarthRadiusKm) {
      mask[Action::ca_below(i).encode(n)] = 1;
    }
    return mask;
  }
  for (int i = 0; i < n; ++i) {
    if (!state.visited_mask[i]) {
      mask[Action::debris(i).encode(n)] = 1;
    }
  }
  if (state.refuel_eligible) {
    mask[Action::refuel().encode(n)] = 1;
  }
  return mask;
}

astro::TransferPlan Environment::oriented_plan(const MissionState& state,
                                               double r_target_km) const {
  astro::TransferPlan plan = astro::hohmann_plan(state.current_radius_km, r_target_km);
  plan.departure_latitude_rad = state.current_anomaly_rad;
  plan.plane = plane_;
  return plan;
}

CaSearch Environment::search_ca(const MissionState& state,
                                astro::CaDirection direction) const {
  if (!state.pending_target.has_value() || !state.active_zone.has_value()) {
    throw std::logic_error("search_ca requires a pending target and an active zone");
  }
  const MissionParams& params = scenario_->params;
  const double r_target = debris_radius_km(*state.pending_target);

  CaSearch search;
  search.best_clearance_km = -std::numeric_limits<double>::infinity();
  for (double delta_r = kCaLadderStepKm; delta_r <= kCaLadderMaxKm;
       delta_r += kCaLadderStepKm) {
    if (direction == astro::CaDirection::Below &&
        r_target - delta_r <= kEarthRadiusKm) {
      continue;
    }
    astro::TransferPlan plan =
        astro::ca_adjusted_plan(state.current_radius_km, r_target, delta_r, direction);
    plan.departure_latitude_rad = state.current_anomaly_rad;
    plan.plane = plane_;
    const std::vector<Vec3> arc = astro::transfer_arc_points(plan, params.sample_interval_s);
    const double clearance = min_clearance_km(arc, *state.active_zone);
    search.best_clearance_km = std::max(search.best_clearance_km, clearance);
    if (clearance >= params.clearance_km) {
      search.certified = CaCandidate{direction, delta_r, plan, clearance};
      break;
    }
  }
  return search;
}

void Environment::fly(MissionState& state, const astro::TransferPlan& plan) const {
  state.fuel -= plan.delta_v_total_km_s / scenario_->params.max_delta_v_km_s;
  state.elapsed_s += plan.time_of_flight_s;
  state.dv_spent_total_km_s += plan.delta_v_total_km_s;
  state.current_radius_km = plan.r2_km;
  // Half-ellipse transfers arrive half a revolution past departure.
  state.current_anomaly_rad = astro::wrap_angle(state.current_anomaly_rad + kPi);
}

double Environment::apply_termination(MissionState& state) const {
  if (state.fuel < 0.0) {
    state.terminal = true;
    state.reason = TerminationReason::FuelExhausted;
    return 1.0;
  }
  if (state.elapsed_s > scenario_->params.max_duration_s) {
    state.terminal = true;
    state.reason = TerminationReason::TimeExhausted;
    return 1.0;
  }
  if (state.all_visited()) {
    state.terminal = true;
    state.reason = TerminationReason::AllVisited;
  }
  return 0.0;
}

StepOutcome Environment::step_debris(MissionState& state, int target) const {
  const MissionParams& params = scenario_->params;
  const astro::TransferPlan plan = oriented_plan(state, debris_radius_km(target));

  if (state.rng.bernoulli(params.collision_probability)) {
    // The chosen transfer is blocked: spawn a zone on the nominal arc and
    // await a CA decision. No motion, no cost.
    const std::vector<Vec3> arc = astro::transfer_arc_points(plan, params.sample_interval_s);
    state.active_zone = spawn_zone(state.rng, arc, params);
    state.pending_target = target;
    StepOutcome outcome;
    outcome.reward = 0.0;
    return outcome;
  }

  fly(state, plan);
  state.visited_mask[target] = 1;
  state.refuel_eligible = true;

  StepOutcome outcome;
  outcome.info.dv_spent_km_s = plan.delta_v_total_km_s;
  outcome.info.tof_s = plan.time_of_flight_s;
  outcome.reward = 1.0 - apply_termination(state);
  outcome.terminal = state.terminal;
  outcome.reason = state.reason;
  return outcome;
}

StepOutcome Environment::step_refuel(MissionState& state) const {
  const MissionParams& params = scenario_->params;
  const astro::TransferPlan plan = oriented_plan(state, refuel_radius_km());
  fly(state, plan);

  StepOutcome outcome;
  outcome.info.dv_spent_km_s = plan.delta_v_total_km_s;
  outcome.info.tof_s = plan.time_of_flight_s;

  if (state.fuel < 0.0) {
    // The tank ran dry on the way in; no service happens.
    state.terminal = true;
    state.reason = TerminationReason::FuelExhausted;
    outcome.reward = -1.0;
    outcome.terminal = true;
    outcome.reason = state.reason;
    return outcome;
  }

  state.fuel = 1.0;
  state.refuel_eligible = false;
  state.elapsed_s += params.refuel_service_penalty_s;
  outcome.info.tof_s += params.refuel_service_penalty_s;
  outcome.info.refueled = true;
  outcome.reward = -apply_termination(state);
  outcome.terminal = state.terminal;
  outcome.reason = state.reason;
  return outcome;
}

StepOutcome Environment::step_ca(MissionState& state, const Action& action) const {
  const int target = *state.pending_target;
  const astro::CaDirection direction =
      action.kind == Action::Kind::CaAbove ? astro::CaDirection::Above
                                           : astro::CaDirection::Below;
  const CaSearch search = search_ca(state, direction);

  StepOutcome outcome;
  if (!search.certified.has_value()) {
    // No rung in this direction clears the zone: the maneuver fails.
    state.terminal = true;
    state.reason = TerminationReason::Collision;
    outcome.reward = -1.0;
    outcome.terminal = true;
    outcome.reason = state.reason;
    return outcome;
  }

  const CaCandidate& candidate = *search.certified;
  fly(state, candidate.plan);
  state.visited_mask[target] = 1;
  state.refuel_eligible = true;
  state.pending_target.reset();
  state.active_zone.reset();

  outcome.info.dv_spent_km_s = candidate.plan.delta_v_total_km_s;
  outcome.info.tof_s = candidate.plan.time_of_flight_s;
  outcome.info.replanned = true;
  outcome.info.ca_delta_r_km = candidate.plan.radial_offset_km;
  outcome.reward = 1.0 - apply_termination(state);
  outcome.terminal = state.terminal;
  outcome.reason = state.reason;
  return outcome;
}

void Environment::log_step(MissionState& state, const Action& action,
                           const StepOutcome& outcome, bool zone_triggered) const {
  TraceEntry entry;
  entry.step = static_cast<int>(state.trace.size());
  entry.action = action;
  entry.dv_spent_km_s = outcome.info.dv_spent_km_s;
  entry.tof_s = outcome.info.tof_s;
  entry.reward = outcome.reward;
  entry.fuel_after = state.fuel;
  entry.elapsed_after = state.elapsed_s;
  entry.replanned = outcome.info.replanned;
  entry.refueled = outcome.info.refueled;
  entry.zone_triggered = zone_triggered;
  entry.terminal_reason = outcome.reason;
  state.trace.push_back(entry);
}

StepOutcome Environment::step(MissionState& state, const Action& action) const {
  const std::vector<std::uint8_t> mask = action_mask(state);  // throws if terminal
  const int index = action.encode(n_debris());
  if (!mask[index]) {
    throw std::logic_error("action " + action.label() + " is invalid under the current mask");
  }

  StepOutcome outcome;
  switch (action.kind) {
    case Action::Kind::Debris:
      outcome = step_debris(state, action.target);
      break;
    case Action::Kind::Refuel:
      outcome = step_refuel(state);
      break;
    case Action::Kind::CaAbove:
    case Action::Kind::CaBelow:
      outcome = step_ca(state, action);
      break;
  }
  const bool zone_triggered =
      action.kind == Action::Kind::Debris && state.pending_target.has_value();
  log_step(state, action, outcome, zone_triggered);
  return outcome;
}

void write_episode_log(const MissionState& state, std::ostream& out) {
  out << "step,action_label,dv_spent,tof_s,reward,fuel_after,elapsed_after,"
         "replanned,refueled,terminal_reason\n";
  for (const TraceEntry& entry : state.trace) {
    out << entry.step << ',' << entry.action.label() << ','
        << format_double(entry.dv_spent_km_s) << ',' << format_double(entry.tof_s) << ','
        << format_double(entry.reward) << ',' << format_double(entry.fuel_after) << ','
        << format_double(entry.elapsed_after) << ',' << (entry.replanned ? 1 : 0) << ','
        << (entry.refueled ? 1 : 0) << ',' << to_string(entry.terminal_reason) << '\n';
  }
}

}  // namespace adr
