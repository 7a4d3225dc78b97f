#include "adr/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "adr/constants.hpp"
#include "adr/rng.hpp"
#include "adr/util.hpp"

namespace adr {

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
  throw std::runtime_error("scenario parse error at line " + std::to_string(line_no) +
                           ": " + what);
}

constexpr const char* kColumnHeader = "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg";

}  // namespace

void MissionParams::validate() const {
  if (n_debris < 1) throw std::invalid_argument("MissionParams: n_debris must be >= 1");
  if (!(collision_probability >= 0.0 && collision_probability <= 1.0)) {
    throw std::invalid_argument("MissionParams: collision_probability must be in [0, 1]");
  }
  const double positives[] = {zone_half_extents_km.x, zone_half_extents_km.y,
                              zone_half_extents_km.z, clearance_km,
                              max_delta_v_km_s,       max_duration_s,
                              refuel_service_penalty_s, refuel_orbit_altitude_km,
                              sample_interval_s};
  for (double v : positives) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw std::invalid_argument("MissionParams: all values must be finite and positive");
    }
  }
}

double canonicalize_angle_rad(double angle_rad) {
  for (int i = 0; i < 8; ++i) {
    const double round_trip = deg2rad(rad2deg(angle_rad));
    if (round_trip == angle_rad) break;
    angle_rad = round_trip;
  }
  return angle_rad;
}

Scenario generate_scenario(std::uint64_t seed, const MissionParams& params) {
  params.validate();

  Scenario scenario;
  scenario.seed = seed;
  scenario.params = params;

  scenario.initial_orbit.semi_major_axis_km = kEarthRadiusKm + kShellFloorAltitudeKm;
  scenario.initial_orbit.inclination_rad = canonicalize_angle_rad(deg2rad(96.0));

  // One draw pair per debris, in id order: altitude first, then anomaly.
  SplitMix64 rng(seed);
  scenario.debris.reserve(static_cast<std::size_t>(params.n_debris));
  for (int i = 0; i < params.n_debris; ++i) {
    DebrisObject obj;
    obj.id = i;
    obj.elements.semi_major_axis_km =
        kEarthRadiusKm + rng.uniform(kShellFloorAltitudeKm, kShellCeilingAltitudeKm);
    obj.elements.inclination_rad = scenario.initial_orbit.inclination_rad;
    obj.elements.true_anomaly_rad = canonicalize_angle_rad(rng.uniform(0.0, kTwoPi));
    scenario.debris.push_back(obj);
  }
  return scenario;
}

void write_scenario(const Scenario& scenario, std::ostream& out) {
  const MissionParams& p = scenario.params;
  out << "# adr-scenario v1\n";
  out << "# seed=" << scenario.seed << "\n";
  out << "# n_debris=" << p.n_debris << "\n";
  out << "# collision_probability=" << format_double(p.collision_probability) << "\n";
  out << "# zone_half_extent_x_km=" << format_double(p.zone_half_extents_km.x) << "\n";
  out << "# zone_half_extent_y_km=" << format_double(p.zone_half_extents_km.y) << "\n";
  out << "# zone_half_extent_z_km=" << format_double(p.zone_half_extents_km.z) << "\n";
  out << "# clearance_km=" << format_double(p.clearance_km) << "\n";
  out << "# max_delta_v_km_s=" << format_double(p.max_delta_v_km_s) << "\n";
  out << "# max_duration_s=" << format_double(p.max_duration_s) << "\n";
  out << "# refuel_service_penalty_s=" << format_double(p.refuel_service_penalty_s) << "\n";
  out << "# refuel_orbit_altitude_km=" << format_double(p.refuel_orbit_altitude_km) << "\n";
  out << "# sample_interval_s=" << format_double(p.sample_interval_s) << "\n";
  const astro::KeplerianElements& init = scenario.initial_orbit;
  out << "# initial_sma_km=" << format_double(init.semi_major_axis_km) << "\n";
  out << "# initial_ecc=" << format_double(init.eccentricity) << "\n";
  out << "# initial_inc_deg=" << format_double(rad2deg(init.inclination_rad)) << "\n";
  out << "# initial_raan_deg=" << format_double(rad2deg(init.raan_rad)) << "\n";
  out << "# initial_argp_deg=" << format_double(rad2deg(init.arg_perigee_rad)) << "\n";
  out << "# initial_nu_deg=" << format_double(rad2deg(init.true_anomaly_rad)) << "\n";
  out << kColumnHeader << "\n";
  for (const DebrisObject& d : scenario.debris) {
    out << d.id << ',' << format_double(d.elements.semi_major_axis_km) << ','
        << format_double(d.elements.eccentricity) << ','
        << format_double(rad2deg(d.elements.inclination_rad)) << ','
        << format_double(rad2deg(d.elements.raan_rad)) << ','
        << format_double(rad2deg(d.elements.arg_perigee_rad)) << ','
        << format_double(rad2deg(d.elements.true_anomaly_rad)) << "\n";
  }
}

namespace {

/// Parses one CSV angle column (degrees) into canonical radians.
double angle_from_deg_field(std::string_view field, int line_no, const char* what) {
  double deg = 0.0;
  try {
    deg = parse_double(field);
  } catch (const std::exception&) {
    parse_fail(line_no, std::string(what) + " is not a number");
  }
  if (!std::isfinite(deg)) parse_fail(line_no, std::string(what) + " must be finite");
  return canonicalize_angle_rad(astro::wrap_angle(deg2rad(deg)));
}

}  // namespace

Scenario read_scenario(std::istream& in) {
  Scenario scenario;
  MissionParams params;
  astro::KeplerianElements init;
  init.semi_major_axis_km = kEarthRadiusKm + kShellFloorAltitudeKm;
  init.inclination_rad = canonicalize_angle_rad(deg2rad(96.0));

  bool n_debris_given = false;
  bool header_seen = false;
  int line_no = 0;
  std::string line;
  std::map<int, DebrisObject> by_id;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty()) continue;

    if (text.front() == '#') {
      text = trim(text.substr(1));
      if (text.rfind("adr-scenario", 0) == 0) continue;  // format tag line
      const std::size_t eq = text.find('=');
      if (eq == std::string_view::npos) {
        parse_fail(line_no, "expected key=value in parameter header");
      }
      const std::string key(trim(text.substr(0, eq)));
      const std::string_view value = trim(text.substr(eq + 1));
      try {
        if (key == "seed") {
          unsigned long long parsed = 0;
          const auto res = std::from_chars(value.data(), value.data() + value.size(), parsed);
          if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
            parse_fail(line_no, "seed is not an unsigned integer");
          }
          scenario.seed = parsed;
        } else if (key == "n_debris") {
          params.n_debris = static_cast<int>(parse_int(value));
          n_debris_given = true;
        } else if (key == "collision_probability") {
          params.collision_probability = parse_double(value);
        } else if (key == "zone_half_extent_x_km") {
          params.zone_half_extents_km.x = parse_double(value);
        } else if (key == "zone_half_extent_y_km") {
          params.zone_half_extents_km.y = parse_double(value);
        } else if (key == "zone_half_extent_z_km") {
          params.zone_half_extents_km.z = parse_double(value);
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
        } else if (key == "initial_sma_km") {
          init.semi_major_axis_km = parse_double(value);
        } else if (key == "initial_ecc") {
          init.eccentricity = parse_double(value);
        } else if (key == "initial_inc_deg") {
          init.inclination_rad = angle_from_deg_field(value, line_no, "initial_inc_deg");
        } else if (key == "initial_raan_deg") {
          init.raan_rad = angle_from_deg_field(value, line_no, "initial_raan_deg");
        } else if (key == "initial_argp_deg") {
          init.arg_perigee_rad = angle_from_deg_field(value, line_no, "initial_argp_deg");
        } else if (key == "initial_nu_deg") {
          init.true_anomaly_rad = angle_from_deg_field(value, line_no, "initial_nu_deg");
        } else {
          parse_fail(line_no, "unknown parameter key '" + key + "'");
        }
      } catch (const std::runtime_error&) {
        throw;
      } catch (const std::exception&) {
        parse_fail(line_no, "bad value for parameter '" + key + "'");
      }
      continue;
    }

    if (!header_seen) {
      if (text != kColumnHeader) {
        parse_fail(line_no, std::string("expected column header '") + kColumnHeader + "'");
      }
      header_seen = true;
      continue;
    }

    const auto fields = split(text, ',');
    if (fields.size() != 7) {
      parse_fail(line_no, "expected 7 comma-separated fields, got " +
                              std::to_string(fields.size()));
    }
    DebrisObject d;
    try {
      d.id = static_cast<int>(parse_int(trim(fields[0])));
    } catch (const std::exception&) {
      parse_fail(line_no, "id is not an integer");
    }
    try {
      d.elements.semi_major_axis_km = parse_double(trim(fields[1]));
      d.elements.eccentricity = parse_double(trim(fields[2]));
    } catch (const std::exception&) {
      parse_fail(line_no, "malformed numeric field");
    }
    d.elements.inclination_rad = angle_from_deg_field(trim(fields[3]), line_no, "inc_deg");
    d.elements.raan_rad = angle_from_deg_field(trim(fields[4]), line_no, "raan_deg");
    d.elements.arg_perigee_rad = angle_from_deg_field(trim(fields[5]), line_no, "argp_deg");
    d.elements.true_anomaly_rad = angle_from_deg_field(trim(fields[6]), line_no, "nu_deg");

    if (d.elements.semi_major_axis_km <= kEarthRadiusKm ||
        !std::isfinite(d.elements.semi_major_axis_km)) {
      parse_fail(line_no, "sma_km must exceed the Earth radius");
    }
    if (!(d.elements.eccentricity >= 0.0 && d.elements.eccentricity < 1.0)) {
      parse_fail(line_no, "ecc must be in [0, 1)");
    }
    if (by_id.count(d.id) != 0) {
      parse_fail(line_no, "duplicate debris id " + std::to_string(d.id));
    }
    by_id.emplace(d.id, d);
  }

  if (!header_seen) throw std::runtime_error("scenario parse error: no column header found");

  if (!n_debris_given) params.n_debris = static_cast<int>(by_id.size());
  if (params.n_debris != static_cast<int>(by_id.size())) {
    throw std::runtime_error("scenario parse error: n_debris=" +
                             std::to_string(params.n_debris) + " but " +
                             std::to_string(by_id.size()) + " rows present");
  }
  for (const auto& [id, d] : by_id) {
    if (id < 0 || id >= params.n_debris) {
      throw std::runtime_error("scenario parse error: debris id " + std::to_string(id) +
                               " outside [0, n)");
    }
    scenario.debris.push_back(d);
  }

  params.validate();
  if (init.semi_major_axis_km <= kEarthRadiusKm || !std::isfinite(init.semi_major_axis_km)) {
    throw std::runtime_error("scenario parse error: initial_sma_km must exceed the Earth radius");
  }
  if (!(init.eccentricity >= 0.0 && init.eccentricity < 1.0)) {
    throw std::runtime_error("scenario parse error: initial_ecc must be in [0, 1)");
  }
  scenario.params = params;
  scenario.initial_orbit = init;
  return scenario;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  write_scenario(scenario, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return read_scenario(in);
}

}  // namespace adr
