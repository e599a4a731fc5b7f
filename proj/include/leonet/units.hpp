#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace leonet {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMuKm3PerS2 = 398600.4418;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
inline constexpr double kLightSpeedKmPerS = 299792.458;
inline constexpr double kLightSpeedKmPerMs = kLightSpeedKmPerS / 1000.0;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

// One-way free-space propagation latency of a link.
constexpr double propagation_latency_ms(double length_km) noexcept {
  return length_km / kLightSpeedKmPerMs;
}

// Reference latency for a surface distance travelling at 2c/3 (fibre).
constexpr double geodesic_latency_ms(double geodesic_km) noexcept {
  return geodesic_km / (2.0 * kLightSpeedKmPerMs / 3.0);
}

using Nanoseconds = std::chrono::nanoseconds;
using UtcTime = std::chrono::sys_time<Nanoseconds>;

inline double seconds_between(UtcTime from, UtcTime to) noexcept {
  return std::chrono::duration<double>(to - from).count();
}

inline UtcTime add_seconds(UtcTime t, double seconds) {
  return t + std::chrono::duration_cast<Nanoseconds>(std::chrono::duration<double>(seconds));
}

// Parses "YYYY-MM-DDTHH:MM:SS[.fff]Z" (trailing Z optional).
inline UtcTime parse_utc(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double s = 0.0;
  std::string buf(text);
  if (std::sscanf(buf.c_str(), "%d-%d-%dT%d:%d:%lf", &y, &mo, &d, &h, &mi, &s) != 6) {
    throw std::invalid_argument("malformed UTC timestamp: " + buf);
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0.0 || s >= 61.0) {
    throw std::invalid_argument("invalid UTC timestamp: " + buf);
  }
  const auto whole = sys_days{ymd} + hours{h} + minutes{mi};
  return add_seconds(time_point_cast<Nanoseconds>(whole), s);
}

inline std::string format_utc(UtcTime t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const auto rest = t - day_point;
  const auto h = duration_cast<hours>(rest);
  const auto mi = duration_cast<minutes>(rest - h);
  const auto ns = duration_cast<Nanoseconds>(rest - h - mi);
  const auto whole_s = ns.count() / 1'000'000'000;
  const auto frac_ns = ns.count() % 1'000'000'000;
  char out[64];
  if (frac_ns == 0) {
    std::snprintf(out, sizeof out, "%04d-%02u-%02uT%02d:%02d:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(h.count()), static_cast<int>(mi.count()),
                  static_cast<long long>(whole_s));
  } else {
    std::snprintf(out, sizeof out, "%04d-%02u-%02uT%02d:%02d:%02lld.%09lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(mi.count()), static_cast<long long>(whole_s),
                  static_cast<long long>(frac_ns));
  }
  return out;
}

}  // namespace leonet
