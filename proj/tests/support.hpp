#pragma once

#include <string>
#include <vector>

#include "leonet/leonet.hpp"

namespace leonet::testing {

inline const UtcTime kEpoch = parse_utc("2022-01-01T00:00:00Z");

inline ConstellationConfig shell(int n, int p, int f = 0) {
  ConstellationConfig c;
  c.sats_per_plane = n;
  c.planes = p;
  c.phase_factor = f;
  c.altitude_km = 550.0;
  c.inclination_deg = 53.0;
  c.epoch = kEpoch;
  return c;
}

inline Station ground(const std::string& name, double lat, double lon) {
  return Station{name, "EI-" + name, StationKind::ground, GeodeticPoint{lat, lon, 0.0}};
}

inline IslPattern plus_grid() { return {GridKind::plus, {0}}; }
inline IslPattern star_grid() { return {GridKind::star, {-1, 0}}; }

}  // namespace leonet::testing
