#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "leonet/constellation.hpp"
#include "leonet/routing.hpp"
#include "leonet/topology.hpp"
#include "leonet/trajectory.hpp"

namespace leonet {

// Parse or validation failure; `field()` is the dotted path of the culprit.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Connection {
  std::size_t src{0};  // station indices
  std::size_t dst{0};
};

inline constexpr const char* kDefaultEpoch = "2022-01-01T00:00:00Z";

struct Scenario {
  std::string name{"scenario"};
  ConstellationConfig constellation;
  IslPattern pattern;
  TimeGrid time;
  std::vector<Station> stations;
  double elevation_min_deg{40.0};
  std::vector<Connection> connections;
  std::vector<Algorithm> algorithms{Algorithm::mplf_cpi, Algorithm::mplf_nfp, Algorithm::sp, Algorithm::lh};
  std::optional<double> eisl_threshold_km;
  std::size_t max_hops{0};  // 0 resolves to 4 * (N + P)
  double beacon_staleness_s{0.0};
  std::vector<std::string> exports{"csv"};

  std::size_t resolved_max_hops() const { return max_hops == 0 ? default_max_hops(constellation) : max_hops; }

  std::optional<std::size_t> station_index(const std::string& name) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i].name == name) return i;
    return std::nullopt;
  }

  SnapshotOptions snapshot_options() const { return {elevation_min_deg, beacon_staleness_s}; }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

template <typename T>
T field_as(const json& v, const std::string& path) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(path, std::string("wrong type (") + e.what() + ")");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return field_as<T>(*it, path + "." + key);
}

template <typename T>
T get_req(const json& obj, const std::string& key, const std::string& path) {
  return field_as<T>(require(obj, key, path), path + "." + key);
}

inline UtcTime parse_time_field(const json& v, const std::string& path) {
  try {
    return parse_utc(field_as<std::string>(v, path));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path, e.what());
  }
}

inline GeodeticPoint parse_geodetic(const json& v, const std::string& path) {
  GeodeticPoint g;
  g.lat_deg = get_req<double>(v, "lat_deg", path);
  g.lon_deg = get_req<double>(v, "lon_deg", path);
  g.alt_km = get_or<double>(v, "alt_km", 0.0, path);
  if (g.lon_deg == -180.0) g.lon_deg = 180.0;
  if (!g.valid()) throw ScenarioError(path, "latitude/longitude/altitude out of range");
  return g;
}

inline json geodetic_json(const GeodeticPoint& g) {
  return {{"lat_deg", g.lat_deg}, {"lon_deg", g.lon_deg}, {"alt_km", g.alt_km}};
}

template <typename Fn>
auto wrap_validation(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(path, e.what());
  }
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& root) {
  using detail::get_or;
  using detail::get_req;
  using detail::require;
  if (!root.is_object()) throw ScenarioError("", "scenario must be a JSON object");
  Scenario sc;
  sc.name = get_or<std::string>(root, "name", "scenario", "");

  const auto& c = require(root, "constellation", "");
  sc.constellation.sats_per_plane = get_req<int>(c, "N", "constellation");
  sc.constellation.planes = get_req<int>(c, "P", "constellation");
  sc.constellation.phase_factor = get_req<int>(c, "F", "constellation");
  sc.constellation.altitude_km = get_or<double>(c, "altitude_km", 550.0, "constellation");
  sc.constellation.inclination_deg = get_or<double>(c, "inclination_deg", 53.0, "constellation");
  sc.constellation.epoch = c.contains("epoch") ? detail::parse_time_field(c["epoch"], "constellation.epoch")
                                               : parse_utc(kDefaultEpoch);
  if (sc.constellation.phase_factor == sc.constellation.planes) sc.constellation.phase_factor = 0;
  detail::wrap_validation("constellation", [&] { sc.constellation.validate(); return 0; });

  if (root.contains("pattern")) {
    const auto& p = root["pattern"];
    sc.pattern.grid = detail::wrap_validation("pattern.grid", [&] {
      return parse_grid_kind(get_or<std::string>(p, "grid", "+Grid", "pattern"));
    });
    const std::vector<int> fallback = sc.pattern.grid == GridKind::plus ? std::vector<int>{0}
                                                                        : std::vector<int>{-1, 0};
    sc.pattern.bias = get_or<std::vector<int>>(p, "bias", fallback, "pattern");
    std::sort(sc.pattern.bias.begin(), sc.pattern.bias.end());
  }
  detail::wrap_validation("pattern", [&] { sc.pattern.validate(); return 0; });

  const auto& t = require(root, "time", "");
  sc.time.start = t.contains("start") ? detail::parse_time_field(t["start"], "time.start") : sc.constellation.epoch;
  sc.time.step_s = get_req<double>(t, "step_s", "time");
  if (t.contains("count")) {
    sc.time.count = get_req<std::size_t>(t, "count", "time");
  } else if (t.contains("duration_s")) {
    const double d = get_req<double>(t, "duration_s", "time");
    if (!(d > 0.0)) throw ScenarioError("time.duration_s", "must be > 0");
    sc.time.count = static_cast<std::size_t>(std::floor(d / sc.time.step_s + 1e-9));
  } else {
    throw ScenarioError("time.count", "missing required field (or time.duration_s)");
  }
  detail::wrap_validation("time", [&] { sc.time.validate(); return 0; });
  if (sc.time.start < sc.constellation.epoch) throw ScenarioError("time.start", "precedes constellation epoch");

  sc.elevation_min_deg = get_or<double>(root, "elevation_min_deg", 40.0, "");
  if (!(sc.elevation_min_deg >= 0.0 && sc.elevation_min_deg < 90.0)) {
    throw ScenarioError("elevation_min_deg", "must lie in [0, 90)");
  }

  if (root.contains("stations")) {
    const auto& list = root["stations"];
    if (!list.is_array()) throw ScenarioError("stations", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "stations[" + std::to_string(i) + "]";
      const auto& s = list[i];
      Station st;
      st.name = get_req<std::string>(s, "name", path);
      st.ei = get_or<std::string>(s, "ei", st.name, path);
      const std::string kind = get_or<std::string>(s, "kind", s.contains("trajectory") ? "mobile" : "ground", path);
      if (kind == "ground") {
        st.kind = StationKind::ground;
        st.location = detail::parse_geodetic(s, path);
      } else if (kind == "mobile") {
        st.kind = StationKind::mobile;
        const auto& tr = require(s, "trajectory", path);
        const std::string tp = path + ".trajectory";
        Trajectory traj;
        traj.start = detail::parse_geodetic(require(tr, "from", tp), tp + ".from");
        traj.end = detail::parse_geodetic(require(tr, "to", tp), tp + ".to");
        traj.speed_km_s = get_req<double>(tr, "speed_km_s", tp);
        traj.start_time = tr.contains("start_time") ? detail::parse_time_field(tr["start_time"], tp + ".start_time")
                                                    : sc.time.start;
        detail::wrap_validation(tp, [&] { traj.validate(); return 0; });
        st.location = traj;
      } else {
        throw ScenarioError(path + ".kind", "must be 'ground' or 'mobile'");
      }
      if (sc.station_index(st.name)) throw ScenarioError(path + ".name", "duplicate station name '" + st.name + "'");
      sc.stations.push_back(std::move(st));
    }
    detail::wrap_validation("stations", [&] { validate_stations(sc.stations); return 0; });
  }

  if (root.contains("connections")) {
    const auto& list = root["connections"];
    if (!list.is_array()) throw ScenarioError("connections", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "connections[" + std::to_string(i) + "]";
      std::string src, dst;
      if (list[i].is_array() && list[i].size() == 2) {
        src = detail::field_as<std::string>(list[i][0], path + "[0]");
        dst = detail::field_as<std::string>(list[i][1], path + "[1]");
      } else {
        src = get_req<std::string>(list[i], "src", path);
        dst = get_req<std::string>(list[i], "dst", path);
      }
      const auto si = sc.station_index(src);
      const auto di = sc.station_index(dst);
      if (!si) throw ScenarioError(path, "unknown station '" + src + "'");
      if (!di) throw ScenarioError(path, "unknown station '" + dst + "'");
      if (*si == *di) throw ScenarioError(path, "connection endpoints must differ");
      sc.connections.push_back({*si, *di});
    }
  }

  if (root.contains("algorithms")) {
    sc.algorithms.clear();
    const auto names = detail::field_as<std::vector<std::string>>(root["algorithms"], "algorithms");
    for (const auto& n : names) {
      const Algorithm a = detail::wrap_validation("algorithms", [&] { return parse_algorithm(n); });
      if (std::find(sc.algorithms.begin(), sc.algorithms.end(), a) != sc.algorithms.end()) {
        throw ScenarioError("algorithms", "duplicate algorithm '" + n + "'");
      }
      sc.algorithms.push_back(a);
    }
  }

  if (root.contains("eisl")) {
    const auto& e = root["eisl"];
    if (e.contains("L_h_km")) {
      const double lh = detail::field_as<double>(e["L_h_km"], "eisl.L_h_km");
      if (!(lh > 0.0)) throw ScenarioError("eisl.L_h_km", "must be > 0");
      sc.eisl_threshold_km = lh;
    }
  }

  const auto mh = get_or<long long>(root, "max_hops", 0, "");
  if (mh < 0) throw ScenarioError("max_hops", "must be >= 1 (or 0 for the default)");
  sc.max_hops = static_cast<std::size_t>(mh);
  sc.beacon_staleness_s = get_or<double>(root, "beacon_staleness_s", 0.0, "");
  if (!(sc.beacon_staleness_s >= 0.0)) throw ScenarioError("beacon_staleness_s", "must be >= 0");
  if (root.contains("export")) {
    sc.exports = detail::field_as<std::vector<std::string>>(root["export"], "export");
    for (const auto& f : sc.exports)
      if (f != "csv" && f != "geojson") throw ScenarioError("export", "unknown format '" + f + "'");
  }
  return sc;
}

inline Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError("", "cannot open scenario file '" + file + "'");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("", "parse error in '" + file + "': " + e.what());
  }
  return parse_scenario(root);
}

// Normalised form with every default resolved.
inline nlohmann::json to_json(const Scenario& sc) {
  using nlohmann::json;
  json root;
  root["name"] = sc.name;
  root["constellation"] = {{"N", sc.constellation.sats_per_plane},
                           {"P", sc.constellation.planes},
                           {"F", sc.constellation.phase_factor},
                           {"altitude_km", sc.constellation.altitude_km},
                           {"inclination_deg", sc.constellation.inclination_deg},
                           {"epoch", format_utc(sc.constellation.epoch)}};
  root["pattern"] = {{"grid", std::string(to_string(sc.pattern.grid))}, {"bias", sc.pattern.bias}};
  root["time"] = {{"start", format_utc(sc.time.start)}, {"step_s", sc.time.step_s}, {"count", sc.time.count}};
  json stations = json::array();
  for (const auto& st : sc.stations) {
    json s = {{"name", st.name}, {"ei", st.ei}};
    if (const auto* g = std::get_if<GeodeticPoint>(&st.location)) {
      s["kind"] = "ground";
      s.update(detail::geodetic_json(*g));
    } else {
      const auto& tr = std::get<Trajectory>(st.location);
      s["kind"] = "mobile";
      s["trajectory"] = {{"from", detail::geodetic_json(tr.start)},
                         {"to", detail::geodetic_json(tr.end)},
                         {"speed_km_s", tr.speed_km_s},
                         {"start_time", format_utc(tr.start_time)}};
    }
    stations.push_back(std::move(s));
  }
  root["stations"] = std::move(stations);
  json conns = json::array();
  for (const auto& c : sc.connections)
    conns.push_back({{"src", sc.stations[c.src].name}, {"dst", sc.stations[c.dst].name}});
  root["connections"] = std::move(conns);
  json algos = json::array();
  for (Algorithm a : sc.algorithms) algos.push_back(std::string(to_string(a)));
  root["algorithms"] = std::move(algos);
  root["elevation_min_deg"] = sc.elevation_min_deg;
  root["eisl"] = json::object();
  if (sc.eisl_threshold_km) root["eisl"]["L_h_km"] = *sc.eisl_threshold_km;
  root["max_hops"] = sc.resolved_max_hops();
  root["beacon_staleness_s"] = sc.beacon_staleness_s;
  root["export"] = sc.exports;
  return root;
}

}  // namespace leonet
