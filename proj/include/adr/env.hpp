#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adr/astro.hpp"
#include "adr/rng.hpp"
#include "adr/scenario.hpp"
#include "adr/vec3.hpp"

namespace adr {

/// Axis-aligned cuboid danger zone.
struct CollisionZone {
  Vec3 center_km;
  Vec3 half_extents_km;

  bool operator==(const CollisionZone& o) const = default;
};

/// Discrete mission action. Flat encoding over 3n+1 indices:
/// [0, n) Debris(i), n Refuel, n+1+i CAAbove(i), 2n+1+i CABelow(i).
struct Action {
  enum class Kind { Debris, Refuel, CaAbove, CaBelow };

  Kind kind = Kind::Refuel;
  int target = -1;  // debris id for Debris/CaAbove/CaBelow, -1 for Refuel

  static Action debris(int i) { return {Kind::Debris, i}; }
  static Action refuel() { return {Kind::Refuel, -1}; }
  static Action ca_above(int i) { return {Kind::CaAbove, i}; }
  static Action ca_below(int i) { return {Kind::CaBelow, i}; }

  int encode(int n_debris) const;
  static Action decode(int index, int n_debris);

  /// Trace label: DEBRIS_k, Refuel, CA_ABOVE_DEBRIS_k, CA_BELOW_DEBRIS_k.
  std::string label() const;

  bool operator==(const Action& o) const = default;
};

enum class TerminationReason { None, AllVisited, FuelExhausted, TimeExhausted, Collision };

const char* to_string(TerminationReason reason);

/// Per-step metric deltas surfaced alongside the reward.
struct StepInfo {
  double dv_spent_km_s = 0.0;
  double tof_s = 0.0;
  bool replanned = false;    // a certified CA detour was flown
  bool refueled = false;     // a refuel completed (tank restored)
  double ca_delta_r_km = 0.0;  // signed radial offset of a flown detour
};

struct StepOutcome {
  double reward = 0.0;
  bool terminal = false;
  TerminationReason reason = TerminationReason::None;
  StepInfo info;
};

/// One audit-log row per step taken.
struct TraceEntry {
  int step = 0;
  Action action;
  double dv_spent_km_s = 0.0;
  double tof_s = 0.0;
  double reward = 0.0;
  double fuel_after = 0.0;
  double elapsed_after = 0.0;
  bool replanned = false;
  bool refueled = false;
  bool zone_triggered = false;  // this selection spawned a zone (no motion)
  TerminationReason terminal_reason = TerminationReason::None;

  bool operator==(const TraceEntry& o) const = default;
};

/// Full simulator state. A plain value type so planners can clone it.
struct MissionState {
  double elapsed_s = 0.0;
  double fuel = 1.0;
  double current_radius_km = 0.0;
  /// Argument of latitude in the shared plane. All mission orbits are
  /// circular with zero argument of perigee, so this equals true anomaly.
  double current_anomaly_rad = 0.0;
  std::vector<std::uint8_t> visited_mask;
  bool refuel_eligible = false;
  std::optional<int> pending_target;
  std::optional<CollisionZone> active_zone;
  SplitMix64 rng;
  bool terminal = false;
  TerminationReason reason = TerminationReason::None;
  double dv_spent_total_km_s = 0.0;
  std::vector<TraceEntry> trace;

  int visited_count() const;
  bool all_visited() const;

  bool operator==(const MissionState& o) const = default;
};

/// True iff any sampled point lies inside the closed cuboid
/// (per-axis |p - c| <= half_extent).
bool arc_intersects_zone(std::span<const Vec3> arc_points, const CollisionZone& zone);

/// Minimum over sampled points of the Euclidean distance to the cuboid
/// surface; negative when the closest point is inside.
double min_clearance_km(std::span<const Vec3> arc_points, const CollisionZone& zone);

/// Cuboid of the configured half-extents centered uniformly on an interior
/// sample of the nominal arc (midpoint of the endpoints when the arc has no
/// interior), so the nominal arc always intersects the spawned zone.
CollisionZone spawn_zone(SplitMix64& rng, std::span<const Vec3> nominal_arc,
                         const MissionParams& params);

/// One detour candidate that certified the clearance requirement.
struct CaCandidate {
  astro::CaDirection direction = astro::CaDirection::Above;
  double delta_r_km = 0.0;
  astro::TransferPlan plan;
  double min_clearance_km = 0.0;
};

/// Result of scanning the detour ladder in one direction.
struct CaSearch {
  std::optional<CaCandidate> certified;  // smallest qualifying delta-r, if any
  double best_clearance_km = 0.0;        // best clearance seen across the ladder
};

/// The MDP. Holds a reference to the scenario; all mutable state lives in
/// MissionState, so independent states can be stepped concurrently.
class Environment {
 public:
  explicit Environment(const Scenario& scenario);

  int n_debris() const { return scenario_->params.n_debris; }
  int action_count() const { return 3 * n_debris() + 1; }
  int observation_size() const { return 8 * n_debris() + 5; }

  MissionState reset(std::uint64_t episode_seed) const;

  /// Observation layout v1, every component in [0, 1]:
  /// [fuel, remaining-time fraction, radius shell coordinate,
  ///  visited mask (n), per-debris elements a,e,i,raan,argp,nu (6n),
  ///  refuel_eligible, refuel-orbit distance, per-debris risk flag (n)].
  std::vector<double> observe(const MissionState& state) const;

  /// Bit vector over the flat action encoding. Throws std::logic_error on a
  /// terminal state.
  std::vector<std::uint8_t> action_mask(const MissionState& state) const;

  /// Advances the state. Throws std::logic_error when the action is invalid
  /// under the current mask (masking is the caller's job; the env guards).
  StepOutcome step(MissionState& state, const Action& action) const;

  /// Scans the detour ladder (5, 10, ..., 50 km) in one direction against
  /// the active zone. Requires a pending target.
  CaSearch search_ca(const MissionState& state, astro::CaDirection direction) const;

  /// Hohmann plan from the current state to the given radius, oriented at
  /// the current argument of latitude in the shared mission plane.
  astro::TransferPlan oriented_plan(const MissionState& state, double r_target_km) const;

  double debris_radius_km(int debris_id) const;
  const astro::KeplerianElements& debris_elements(int debris_id) const;
  double refuel_radius_km() const;
  const Scenario& scenario() const { return *scenario_; }

  static constexpr double kCaLadderStepKm = 5.0;
  static constexpr double kCaLadderMaxKm = 50.0;
  static constexpr int kObservationLayoutVersion = 1;

 private:
  StepOutcome step_debris(MissionState& state, int target) const;
  StepOutcome step_refuel(MissionState& state) const;
  StepOutcome step_ca(MissionState& state, const Action& action) const;
  void fly(MissionState& state, const astro::TransferPlan& plan) const;
  /// Applies exhaustion/completion checks in the contractual order and
  /// returns the penalty term (0 or -1).
  double apply_termination(MissionState& state) const;
  void log_step(MissionState& state, const Action& action, const StepOutcome& outcome,
                bool zone_triggered) const;

  const Scenario* scenario_;
  std::vector<int> debris_by_id_;
  astro::OrbitPlane plane_;
  double initial_latitude_rad_ = 0.0;
};

/// Episode audit log CSV: step, action_label, dv_spent, tof_s, reward,
/// fuel_after, elapsed_after, replanned, refueled, terminal_reason.
void write_episode_log(const MissionState& state, std::ostream& out);

}  // namespace adr
