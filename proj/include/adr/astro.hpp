#pragma once

#include <vector>

#include "adr/vec3.hpp"

namespace adr::astro {

/// Classical orbital elements. Angles in radians, lengths in km.
struct KeplerianElements {
  double semi_major_axis_km = 0.0;
  double eccentricity = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
  double arg_perigee_rad = 0.0;
  double true_anomaly_rad = 0.0;

  bool operator==(const KeplerianElements& o) const = default;
};

/// Cartesian ECI state.
struct StateVector {
  Vec3 position_km;
  Vec3 velocity_km_s;
};

/// Side of the nominal target radius a collision-avoidance detour passes on.
enum class CaDirection { Above, Below };

/// Orientation of the shared mission plane; arcs are embedded in it.
struct OrbitPlane {
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
};

/// A two-burn coplanar transfer between circular orbits. For nominal Hohmann
/// plans radial_offset_km is 0; for CA-adjusted plans it is +dr (Above) or
/// -dr (Below): the detour ellipse terminates at r2_km + radial_offset_km,
/// where the arrival charge circularizes and additionally re-targets the
/// circular speed at r2_km (the return leg itself is not flown).
struct TransferPlan {
  double r1_km = 0.0;
  double r2_km = 0.0;
  double delta_v_depart_km_s = 0.0;
  double delta_v_arrive_km_s = 0.0;
  double delta_v_total_km_s = 0.0;
  double time_of_flight_s = 0.0;
  double transfer_semi_major_axis_km = 0.0;
  double radial_offset_km = 0.0;

  /// Placement of the arc in space (set by the caller before sampling
  /// points): argument of latitude at departure and the orbit plane.
  double departure_latitude_rad = 0.0;
  OrbitPlane plane;
};

/// Circular orbit speed sqrt(mu/r) [km/s]. Throws std::domain_error unless
/// radius_km is finite and positive.
double circular_velocity(double radius_km);

/// Vis-viva speed sqrt(mu(2/r - 1/a)) [km/s]. Throws std::domain_error when
/// the radicand is negative or inputs are not finite/positive.
double vis_viva_speed(double radius_km, double semi_major_axis_km);

/// Period 2*pi*sqrt(a^3/mu) [s].
double orbital_period_s(double semi_major_axis_km);

/// Mean motion sqrt(mu/a^3) [rad/s].
double mean_motion_rad_s(double semi_major_axis_km);

/// Two-burn Hohmann transfer between circular orbits of radii r1 and r2.
/// Degenerate case r1 == r2 yields zero delta-v and a half-period coast.
/// Throws std::domain_error unless both radii are finite and above the
/// Earth radius.
TransferPlan hohmann_plan(double r1_km, double r2_km);

/// CA-adjusted transfer: a half-ellipse from r1 to r2 +/- delta_r whose
/// arrival burn re-targets the circular speed at r2. Throws
/// std::domain_error for non-finite/non-positive delta_r, invalid radii, or
/// a Below detour whose far point does not stay above the Earth radius.
TransferPlan ca_adjusted_plan(double r1_km, double r2_km, double delta_r_km,
                              CaDirection direction);

/// Advances a circular orbit (e == 0) by dt seconds: true anomaly moves by
/// mean motion * dt, wrapped to [0, 2*pi). Throws std::logic_error when
/// called with a non-circular orbit and std::domain_error for non-finite dt.
KeplerianElements propagate_circular(const KeplerianElements& elements, double dt_s);

/// Samples the transfer arc at uniform time steps of at most
/// sample_interval_s, endpoints included: ceil(tof/interval) + 1 points.
/// A non-positive time of flight yields the two coincident endpoints.
/// Throws std::domain_error unless sample_interval_s is finite and positive.
std::vector<Vec3> transfer_arc_points(const TransferPlan& plan, double sample_interval_s);

/// Classical elements -> Cartesian ECI state (elliptic orbits, e < 1).
StateVector elements_to_state(const KeplerianElements& elements);

/// Position on a circle of radius_km in the given plane at argument of
/// latitude u (angle from the ascending node).
Vec3 plane_position(const OrbitPlane& plane, double latitude_rad, double radius_km);

/// Wraps an angle to [0, 2*pi).
double wrap_angle(double angle_rad);

/// Solves Kepler's equation M = E - e sin E for E (0 <= e < 1).
double solve_eccentric_anomaly(double mean_anomaly_rad, double eccentricity);

}  // namespace adr::astro
