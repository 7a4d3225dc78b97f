#pragma once

#include <numbers>

namespace adr {

/// WGS-84 gravitational parameter of Earth [km^3/s^2].
inline constexpr double kMuEarthKm3S2 = 398600.4418;

/// WGS-84 equatorial radius of Earth [km].
inline constexpr double kEarthRadiusKm = 6378.137;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Debris shell altitude band [km]; also used to normalize observations.
inline constexpr double kShellFloorAltitudeKm = 700.0;
inline constexpr double kShellCeilingAltitudeKm = 800.0;
inline constexpr double kShellThicknessKm =
    kShellCeilingAltitudeKm - kShellFloorAltitudeKm;

inline constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

}  // namespace adr
