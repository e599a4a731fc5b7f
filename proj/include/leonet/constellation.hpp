#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "leonet/units.hpp"
#include "leonet/vec3.hpp"

namespace leonet {

// Largest-offset phase factor of a Walker shell with `planes` planes.
constexpr int max_phase_factor(int planes) {
  if (planes < 1) throw std::invalid_argument("plane count must be >= 1");
  return planes % 2 == 0 ? planes / 2 - 1 : (planes - 1) / 2;
}

// Walker shell written N/P/F: N satellites per plane, P planes, phase factor F.
struct ConstellationConfig {
  int sats_per_plane{1};
  int planes{1};
  int phase_factor{0};
  double altitude_km{550.0};
  double inclination_deg{53.0};
  UtcTime epoch{};

  int total() const noexcept { return sats_per_plane * planes; }
  double semi_major_axis_km() const noexcept { return kEarthRadiusKm + altitude_km; }

  // F = P yields the same geometry as F = 0, so it is accepted here.
  void validate() const {
    if (sats_per_plane < 1) throw std::invalid_argument("constellation.N must be >= 1");
    if (planes < 1) throw std::invalid_argument("constellation.P must be >= 1");
    if (phase_factor < 0 || phase_factor > planes) {
      throw std::invalid_argument("constellation.F must lie in [0, P-1] (F = P accepted as 0)");
    }
    if (!(altitude_km > 0.0) || !std::isfinite(altitude_km)) {
      throw std::invalid_argument("constellation.altitude_km must be > 0");
    }
    if (!(inclination_deg >= 0.0 && inclination_deg <= 180.0)) {
      throw std::invalid_argument("constellation.inclination_deg must lie in [0, 180]");
    }
  }
};

struct TimeGrid {
  UtcTime start{};
  double step_s{10.0};
  std::size_t count{1};

  void validate() const {
    if (!(step_s > 0.0)) throw std::invalid_argument("time.step_s must be > 0");
  }
  UtcTime stamp(std::size_t index) const {
    return add_seconds(start, step_s * static_cast<double>(index));
  }
};

struct SatelliteId {
  int plane{0};
  int slot{0};

  std::uint32_t flat(int sats_per_plane) const noexcept {
    return static_cast<std::uint32_t>(plane * sats_per_plane + slot);
  }
  friend constexpr bool operator==(const SatelliteId&, const SatelliteId&) = default;
};

struct EciState {
  Vec3 position;  // km
  Vec3 velocity;  // km/s
  UtcTime time{};
};

// Immutable circular-orbit Walker delta shell.
class Constellation {
 public:
  explicit Constellation(ConstellationConfig config) : config_(config) {
    config_.validate();
    const double a = config_.semi_major_axis_km();
    mean_motion_ = std::sqrt(kEarthMuKm3PerS2 / (a * a * a));
    const int n = config_.sats_per_plane;
    const int p = config_.planes;
    const double inter_plane_phase = 2.0 * kPi * config_.phase_factor / (double(n) * p);
    orbits_.reserve(static_cast<std::size_t>(config_.total()));
    for (int plane = 0; plane < p; ++plane) {
      const double raan = 2.0 * kPi * plane / p;
      for (int slot = 0; slot < n; ++slot) {
        const double u0 = 2.0 * kPi * slot / n + inter_plane_phase * plane;
        orbits_.push_back({raan, u0});
      }
    }
    const double inc = deg_to_rad(config_.inclination_deg);
    sin_inc_ = std::sin(inc);
    cos_inc_ = std::cos(inc);
  }

  const ConstellationConfig& config() const noexcept { return config_; }
  int size() const noexcept { return config_.total(); }
  double mean_motion() const noexcept { return mean_motion_; }  // rad/s
  double period_s() const noexcept { return 2.0 * kPi / mean_motion_; }

  SatelliteId id_of(std::uint32_t flat) const noexcept {
    const int n = config_.sats_per_plane;
    return {static_cast<int>(flat) / n, static_cast<int>(flat) % n};
  }
  std::uint32_t flat(SatelliteId id) const noexcept { return id.flat(config_.sats_per_plane); }

  double raan_rad(std::uint32_t flat) const { return orbits_.at(flat).raan; }
  double initial_argument_of_latitude_rad(std::uint32_t flat) const { return orbits_.at(flat).u0; }

  // Circular two-body state; t is expected to be at or after the epoch.
  EciState satellite_state(SatelliteId id, UtcTime t) const {
    if (id.plane < 0 || id.plane >= config_.planes || id.slot < 0 ||
        id.slot >= config_.sats_per_plane) {
      throw std::out_of_range("satellite id outside constellation");
    }
    return state_of(flat(id), t);
  }

  EciState state_of(std::uint32_t flat, UtcTime t) const {
    const Orbit& o = orbits_.at(flat);
    const double u = o.u0 + mean_motion_ * seconds_between(config_.epoch, t);
    const double a = config_.semi_major_axis_km();
    const double cu = std::cos(u), su = std::sin(u);
    const double co = std::cos(o.raan), so = std::sin(o.raan);
    EciState s;
    s.time = t;
    s.position = {a * (co * cu - so * su * cos_inc_), a * (so * cu + co * su * cos_inc_),
                  a * su * sin_inc_};
    const double v = a * mean_motion_;
    s.velocity = {v * (-co * su - so * cu * cos_inc_), v * (-so * su + co * cu * cos_inc_),
                  v * cu * sin_inc_};
    return s;
  }

  std::vector<EciState> states_at(UtcTime t) const {
    std::vector<EciState> out;
    out.reserve(orbits_.size());
    for (std::uint32_t i = 0; i < orbits_.size(); ++i) out.push_back(state_of(i, t));
    return out;
  }

 private:
  struct Orbit {
    double raan;
    double u0;
  };

  ConstellationConfig config_;
  double mean_motion_{0.0};
  double sin_inc_{0.0};
  double cos_inc_{1.0};
  std::vector<Orbit> orbits_;
};

inline Constellation build_walker(const ConstellationConfig& config) { return Constellation(config); }

}  // namespace leonet
