#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leonet/units.hpp"
#include "leonet/vec3.hpp"

namespace leonet {

// Earth-fixed Cartesian position, km.
struct EcefPoint {
  Vec3 position;
  friend constexpr bool operator==(const EcefPoint&, const EcefPoint&) = default;
};

// Spherical-Earth geodetic coordinates; altitude above the mean radius.
struct GeodeticPoint {
  double lat_deg{0.0};
  double lon_deg{0.0};
  double alt_km{0.0};

  bool valid() const noexcept {
    return lat_deg >= -90.0 && lat_deg <= 90.0 && lon_deg > -180.0 - 1e-12 && lon_deg <= 180.0 &&
           alt_km >= 0.0;
  }
};

inline double wrap_longitude_deg(double lon) {
  double w = std::fmod(lon + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  w -= 180.0;
  return w <= -180.0 ? w + 360.0 : w;
}

inline EcefPoint geodetic_to_ecef(const GeodeticPoint& g) {
  const double r = kEarthRadiusKm + g.alt_km;
  const double lat = deg_to_rad(g.lat_deg), lon = deg_to_rad(g.lon_deg);
  return {{r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)}};
}

inline GeodeticPoint ecef_to_geodetic(const EcefPoint& p) {
  const Vec3& v = p.position;
  const double r = norm(v);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  GeodeticPoint g;
  g.lat_deg = rad_to_deg(std::asin(std::clamp(v.z / r, -1.0, 1.0)));
  g.lon_deg = (v.x == 0.0 && v.y == 0.0) ? 0.0 : wrap_longitude_deg(rad_to_deg(std::atan2(v.y, v.x)));
  g.alt_km = std::max(0.0, r - kEarthRadiusKm);
  return g;
}

// Earth rotation angle since the reference epoch.
inline double earth_rotation_angle(UtcTime t, UtcTime epoch) {
  return kEarthRotationRadPerS * seconds_between(epoch, t);
}

inline Vec3 rotate_z(const Vec3& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

inline Vec3 ecef_to_eci(const EcefPoint& p, UtcTime t, UtcTime epoch) {
  return rotate_z(p.position, earth_rotation_angle(t, epoch));
}

inline EcefPoint eci_to_ecef(const Vec3& eci, UtcTime t, UtcTime epoch) {
  return {rotate_z(eci, -earth_rotation_angle(t, epoch))};
}

// Elevation of `sat` above the local horizon at `ground`, degrees in [-90, 90].
// Both points must be in the same frame.
inline double elevation_angle(const Vec3& ground, const Vec3& sat) {
  const double g = norm(ground);
  if (!(g > 0.0)) throw std::invalid_argument("elevation_angle: ground point at Earth centre");
  const Vec3 los = sat - ground;
  const double range = norm(los);
  if (range == 0.0) return 90.0;
  const double s = dot(ground, los) / (g * range);
  return rad_to_deg(std::asin(std::clamp(s, -1.0, 1.0)));
}

inline double elevation_angle(const EcefPoint& ground, const EcefPoint& sat) {
  return elevation_angle(ground.position, sat.position);
}

// Signed angle between a link vector and the equator plane, radians.
inline double link_equator_angle(const Vec3& e) {
  const double n = norm(e);
  if (!(n > 0.0)) throw std::invalid_argument("link_equator_angle: zero-length link vector");
  return kPi / 2.0 - std::acos(std::clamp(e.z / n, -1.0, 1.0));
}

// Great-circle distance on the mean-radius sphere.
inline double geodesic_distance(const GeodeticPoint& a, const GeodeticPoint& b) {
  const double la = deg_to_rad(a.lat_deg), lb = deg_to_rad(b.lat_deg);
  const double dlat = lb - la;
  const double dlon = deg_to_rad(b.lon_deg - a.lon_deg);
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(la) * std::cos(lb) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace leonet
