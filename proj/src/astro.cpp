#include "adr/astro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adr/constants.hpp"

namespace adr::astro {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double wrap_angle(double angle_rad) {
  double a = std::fmod(angle_rad, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

double circular_velocity(double radius_km) {
  if (!finite_positive(radius_km)) {
    throw std::domain_error("circular_velocity: radius must be finite and positive");
  }
  return std::sqrt(kMuEarthKm3S2 / radius_km);
}

double vis_viva_speed(double radius_km, double semi_major_axis_km) {
  if (!finite_positive(radius_km) || !finite_positive(semi_major_axis_km)) {
    throw std::domain_error("vis_viva_speed: inputs must be finite and positive");
  }
  const double radicand = kMuEarthKm3S2 * (2.0 / radius_km - 1.0 / semi_major_axis_km);
  if (radicand < 0.0) {
    throw std::domain_error("vis_viva_speed: radius unreachable from this orbit");
  }
  return std::sqrt(radicand);
}

double orbital_period_s(double semi_major_axis_km) {
  if (!finite_positive(semi_major_axis_km)) {
    throw std::domain_error("orbital_period_s: semi-major axis must be finite and positive");
  }
  return kTwoPi * std::sqrt(semi_major_axis_km * semi_major_axis_km *
                            semi_major_axis_km / kMuEarthKm3S2);
}

double mean_motion_rad_s(double semi_major_axis_km) {
  return kTwoPi / orbital_period_s(semi_major_axis_km);
}

namespace {

/// Speed on the transfer ellipse at radius r. Falls back to the circular
/// formula when the ellipse degenerates to a circle so that a degenerate
/// transfer costs exactly zero delta-v (vis-viva and sqrt(mu/r) can differ
/// by an ulp when evaluated as written).
double ellipse_speed(double r, double a) {
  return r == a ? circular_velocity(r) : vis_viva_speed(r, a);
}

/// Shared construction for Hohmann and CA-adjusted plans: a half-ellipse
/// from circular radius r1 to radius rt. The arrival charge circularizes at
/// rt and then re-targets the circular speed at r_close without flying the
/// return leg; for plain Hohmann r_close == rt and the re-target term is
/// exactly zero. Splitting the arrival this way (rather than one direct
/// |v_circ(r_close) - v_ellipse(rt)| burn) keeps a detour from ever costing
/// less than the nominal transfer when rt lands between r1 and r_close.
TransferPlan half_ellipse_plan(double r1, double rt, double r_close) {
  TransferPlan plan;
  plan.r1_km = r1;
  plan.transfer_semi_major_axis_km = 0.5 * (r1 + rt);

  const double a = plan.transfer_semi_major_axis_km;
  plan.delta_v_depart_km_s = std::abs(ellipse_speed(r1, a) - circular_velocity(r1));
  plan.delta_v_arrive_km_s =
      std::abs(circular_velocity(rt) - ellipse_speed(rt, a)) +
      std::abs(circular_velocity(r_close) - circular_velocity(rt));
  plan.delta_v_total_km_s = plan.delta_v_depart_km_s + plan.delta_v_arrive_km_s;
  plan.time_of_flight_s = 0.5 * orbital_period_s(a);
  return plan;
}

}  // namespace

TransferPlan hohmann_plan(double r1_km, double r2_km) {
  if (!std::isfinite(r1_km) || !std::isfinite(r2_km) ||
      r1_km <= kEarthRadiusKm || r2_km <= kEarthRadiusKm) {
    throw std::domain_error("hohmann_plan: radii must be finite and above the Earth radius");
  }
  TransferPlan plan = half_ellipse_plan(r1_km, r2_km, r2_km);
  plan.r2_km = r2_km;
  plan.radial_offset_km = 0.0;
  return plan;
}

TransferPlan ca_adjusted_plan(double r1_km, double r2_km, double delta_r_km,
                              CaDirection direction) {
  if (!std::isfinite(r1_km) || !std::isfinite(r2_km) ||
      r1_km <= kEarthRadiusKm || r2_km <= kEarthRadiusKm) {
    throw std::domain_error("ca_adjusted_plan: radii must be finite and above the Earth radius");
  }
  if (!finite_positive(delta_r_km)) {
    throw std::domain_error("ca_adjusted_plan: delta_r must be finite and positive");
  }
  const double offset = direction == CaDirection::Above ? delta_r_km : -delta_r_km;
  const double rt = r2_km + offset;
  if (rt <= kEarthRadiusKm) {
    throw std::domain_error("ca_adjusted_plan: detour drops below the Earth radius");
  }
  TransferPlan plan = half_ellipse_plan(r1_km, rt, r2_km);
  plan.r2_km = r2_km;
  plan.radial_offset_km = offset;
  return plan;
}

KeplerianElements propagate_circular(const KeplerianElements& elements, double dt_s) {
  if (elements.eccentricity != 0.0) {
    throw std::logic_error("propagate_circular: orbit must be circular (e == 0)");
  }
  if (!std::isfinite(dt_s)) {
    throw std::domain_error("propagate_circular: dt must be finite");
  }
  KeplerianElements out = elements;
  out.true_anomaly_rad = wrap_angle(
      elements.true_anomaly_rad + mean_motion_rad_s(elements.semi_major_axis_km) * dt_s);
  return out;
}

double solve_eccentric_anomaly(double mean_anomaly_rad, double eccentricity) {
  if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
    throw std::domain_error("solve_eccentric_anomaly: requires 0 <= e < 1");
  }
  const double m = mean_anomaly_rad;
  double e_anom = m + eccentricity * std::sin(m);
  for (int iter = 0; iter < 64; ++iter) {
    const double f = e_anom - eccentricity * std::sin(e_anom) - m;
    const double fp = 1.0 - eccentricity * std::cos(e_anom);
    const double step = f / fp;
    e_anom -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return e_anom;
}

Vec3 plane_position(const OrbitPlane& plane, double latitude_rad, double radius_km) {
  const double cos_raan = std::cos(plane.raan_rad);
  const double sin_raan = std::sin(plane.raan_rad);
  const double cos_inc = std::cos(plane.inclination_rad);
  const double sin_inc = std::sin(plane.inclination_rad);
  const double cos_u = std::cos(latitude_rad);
  const double sin_u = std::sin(latitude_rad);
  return {radius_km * (cos_raan * cos_u - sin_raan * sin_u * cos_inc),
          radius_km * (sin_raan * cos_u + cos_raan * sin_u * cos_inc),
          radius_km * (sin_u * sin_inc)};
}

std::vector<Vec3> transfer_arc_points(const TransferPlan& plan, double sample_interval_s) {
  if (!finite_positive(sample_interval_s)) {
    throw std::domain_error("transfer_arc_points: sample interval must be finite and positive");
  }

  const double r1 = plan.r1_km;
  const double rt = plan.r2_km + plan.radial_offset_km;
  const double a = plan.transfer_semi_major_axis_km;
  const double ecc = std::abs(rt - r1) / (rt + r1);
  const bool raising = rt >= r1;
  const double tof = plan.time_of_flight_s;

  // Departure happens at the ellipse apsis touching r1: periapsis when
  // raising (true anomaly 0 -> pi), apoapsis when lowering (pi -> 2 pi).
  const double m_start = raising ? 0.0 : kPi;
  const double nu_start = m_start;

  if (!(tof > 0.0)) {
    const Vec3 start =
        plane_position(plan.plane, plan.departure_latitude_rad, r1);
    return {start, start};
  }

  const std::size_t n_points =
      static_cast<std::size_t>(std::ceil(tof / sample_interval_s)) + 1;
  std::vector<Vec3> points;
  points.reserve(n_points);

  for (std::size_t k = 0; k < n_points; ++k) {
    // Mean anomaly is linear in time, so stepping it uniformly from m_start
    // to m_start + pi samples the arc at uniform time intervals with exact
    // endpoints.
    const double frac = static_cast<double>(k) / static_cast<double>(n_points - 1);
    const double m = m_start + kPi * frac;
    const double e_anom = solve_eccentric_anomaly(m, ecc);
    const double radius = a * (1.0 - ecc * std::cos(e_anom));
    // True anomaly from eccentric anomaly; atan2 form is robust for all quadrants.
    const double nu = std::atan2(std::sqrt(1.0 - ecc * ecc) * std::sin(e_anom),
                                 std::cos(e_anom) - ecc);
    const double u = plan.departure_latitude_rad + (wrap_angle(nu) - nu_start);
    points.push_back(plane_position(plan.plane, u, radius));
  }
  return points;
}

StateVector elements_to_state(const KeplerianElements& el) {
  if (!(el.eccentricity >= 0.0 && el.eccentricity < 1.0)) {
    throw std::domain_error("elements_to_state: requires 0 <= e < 1");
  }
  const double p = el.semi_major_axis_km * (1.0 - el.eccentricity * el.eccentricity);
  const double r = p / (1.0 + el.eccentricity * std::cos(el.true_anomaly_rad));
  const double u = el.arg_perigee_rad + el.true_anomaly_rad;
  const double h = std::sqrt(kMuEarthKm3S2 * p);

  const double cos_raan = std::cos(el.raan_rad);
  const double sin_raan = std::sin(el.raan_rad);
  const double cos_inc = std::cos(el.inclination_rad);
  const double sin_inc = std::sin(el.inclination_rad);
  const double cos_u = std::cos(u);
  const double sin_u = std::sin(u);

  StateVector sv;
  sv.position_km = {r * (cos_raan * cos_u - sin_raan * sin_u * cos_inc),
                    r * (sin_raan * cos_u + cos_raan * sin_u * cos_inc),
                    r * (sin_u * sin_inc)};

  const double mu_over_h = kMuEarthKm3S2 / h;
  const double sin_term = sin_u + el.eccentricity * std::sin(el.arg_perigee_rad);
  const double cos_term = cos_u + el.eccentricity * std::cos(el.arg_perigee_rad);
  sv.velocity_km_s = {-mu_over_h * (cos_raan * sin_term + sin_raan * cos_term * cos_inc),
                      -mu_over_h * (sin_raan * sin_term - cos_raan * cos_term * cos_inc),
                      mu_over_h * cos_term * sin_inc};
  return sv;
}

}  // namespace adr::astro
