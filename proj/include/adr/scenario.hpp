#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "adr/astro.hpp"
#include "adr/vec3.hpp"

namespace adr {

struct DebrisObject {
  int id = 0;
  astro::KeplerianElements elements;

  bool operator==(const DebrisObject& o) const = default;
};

/// Mission-level configuration. Defaults follow the reference mission:
/// 50 debris, 1/3 zone trigger, 5x5x5 km zones, 5 km clearance, 3 km/s
/// fuel budget, 7-day horizon, 2.5 h refuel service penalty.
struct MissionParams {
  int n_debris = 50;
  double collision_probability = 1.0 / 3.0;
  Vec3 zone_half_extents_km{2.5, 2.5, 2.5};
  double clearance_km = 5.0;
  double max_delta_v_km_s = 3.0;
  double max_duration_s = 604800.0;
  double refuel_service_penalty_s = 9000.0;
  double refuel_orbit_altitude_km = 700.0;
  double sample_interval_s = 60.0;

  /// Throws std::invalid_argument when any field is out of range
  /// (all strictly positive; collision_probability in [0, 1]).
  void validate() const;

  bool operator==(const MissionParams& o) const = default;
};

struct Scenario {
  std::uint64_t seed = 0;
  MissionParams params;
  astro::KeplerianElements initial_orbit;
  std::vector<DebrisObject> debris;

  bool operator==(const Scenario& o) const = default;
};

/// Projects an angle onto the fixed-point set of the deg->rad->deg round
/// trip, so radian values survive the degree-based CSV format field-exactly.
/// Converges in at most a couple of iterations.
double canonicalize_angle_rad(double angle_rad);

/// Deterministically samples params.n_debris objects: altitude uniform in
/// [700, 800] km, true anomaly uniform in [0, 2*pi), eccentricity 0, and the
/// shared 96-degree plane of the initial parking orbit. Pure in (seed, params).
Scenario generate_scenario(std::uint64_t seed, const MissionParams& params);

/// Writes/reads the scenario CSV: a `#`-prefixed key=value parameter header
/// followed by `id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg` rows, UTF-8
/// with LF line endings. Numbers use shortest-round-trip formatting, so
/// load(save(s)) == s field-exactly. Parse errors name the offending line.
void write_scenario(const Scenario& scenario, std::ostream& out);
Scenario read_scenario(std::istream& in);

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace adr
