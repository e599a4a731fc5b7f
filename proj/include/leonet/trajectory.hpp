#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leonet/geometry.hpp"
#include "leonet/units.hpp"

namespace leonet {

// Constant-speed motion along the great circle from `start` toward `end`,
// holding at `end` after arrival. Antipodal endpoints leave the great circle
// undefined; those depart due east.
struct Trajectory {
  GeodeticPoint start;
  GeodeticPoint end;
  double speed_km_s{1.0};
  UtcTime start_time{};

  void validate() const {
    if (!(speed_km_s > 0.0)) throw std::invalid_argument("trajectory speed must be > 0");
    if (!start.valid() || !end.valid()) throw std::invalid_argument("trajectory endpoint out of range");
  }

  // Central angle between endpoints, radians.
  double arc_angle() const {
    const Vec3 a = normalized(geodetic_to_ecef({start.lat_deg, start.lon_deg, 0.0}).position);
    const Vec3 b = normalized(geodetic_to_ecef({end.lat_deg, end.lon_deg, 0.0}).position);
    return std::atan2(norm(cross(a, b)), dot(a, b));
  }

  double arc_length_km() const { return kEarthRadiusKm * arc_angle(); }

  double arrival_offset_s() const { return arc_length_km() / speed_km_s; }

  GeodeticPoint position_at(UtcTime t) const {
    const double elapsed = std::max(0.0, seconds_between(start_time, t));
    const double total = arc_angle();
    const double theta = std::min(total, speed_km_s * elapsed / kEarthRadiusKm);
    if (theta >= total) return end;
    if (theta <= 0.0) return start;

    const Vec3 a = normalized(geodetic_to_ecef({start.lat_deg, start.lon_deg, 0.0}).position);
    const Vec3 b = normalized(geodetic_to_ecef({end.lat_deg, end.lon_deg, 0.0}).position);
    Vec3 tangent = b - a * dot(a, b);
    if (norm(tangent) < 1e-9) {
      tangent = cross(Vec3{0.0, 0.0, 1.0}, a);  // east
      if (norm(tangent) < 1e-12) tangent = Vec3{0.0, 1.0, 0.0};
    }
    tangent = normalized(tangent);
    const Vec3 p = a * std::cos(theta) + tangent * std::sin(theta);
    GeodeticPoint g = ecef_to_geodetic({p});
    g.alt_km = start.alt_km + (end.alt_km - start.alt_km) * (theta / total);
    return g;
  }
};

}  // namespace leonet
