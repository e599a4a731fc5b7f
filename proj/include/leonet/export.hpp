#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "leonet/experiment.hpp"
#include "leonet/topology.hpp"

namespace leonet {

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// Shortest text that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double stamp_offset_s(const Scenario& sc, std::size_t k) {
  return seconds_between(sc.constellation.epoch, sc.time.stamp(k));
}

inline std::string status_text(PathStatus s, const std::optional<DropReason>& r) {
  if (s == PathStatus::delivered) return "delivered";
  return "dropped:" + std::string(to_string(r.value_or(DropReason::dead_end)));
}

// ---------------------------------------------------------------------------
// Path logs

inline constexpr const char* kPathsHeader = "t,algorithm,src_station,dst_station,src_sat,hop_list,latency_ms,hops,status";

inline void write_paths_csv(std::ostream& os, const Scenario& sc, std::span<const PathRecord> records) {
  os << kPathsHeader << '\n';
  for (const auto& r : records) {
    const auto& conn = sc.connections.at(r.connection);
    os << format_fixed(stamp_offset_s(sc, r.stamp), 3) << ',' << to_string(r.algorithm) << ','
       << sc.stations[conn.src].name << ',' << sc.stations[conn.dst].name << ',' << r.src_sat() << ',';
    for (std::size_t i = 0; i < r.satellites.size(); ++i) os << (i ? ";" : "") << r.satellites[i];
    os << ',' << format_exact(r.latency_ms) << ',' << r.hops() << ',' << status_text(r.status, r.drop_reason)
       << '\n';
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::vector<PathRecord> read_paths_csv(std::istream& is, const Scenario& sc) {
  std::vector<PathRecord> out;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line) || line != kPathsHeader) throw ExportError("paths csv: unexpected header");
  ++lineno;
  const double start = stamp_offset_s(sc, 0);
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      return ExportError("paths csv line " + std::to_string(lineno) + ": " + what);
    };
    const auto cols = split(line, ',');
    if (cols.size() != 9) throw fail("expected 9 columns");
    PathRecord r;
    try {
      const double t = std::stod(cols[0]);
      const double k = std::round((t - start) / sc.time.step_s);
      if (k < 0 || k >= static_cast<double>(sc.time.count)) throw fail("time outside scenario grid");
      r.stamp = static_cast<std::size_t>(k);
      r.algorithm = parse_algorithm(cols[1]);
      const auto src = sc.station_index(cols[2]);
      const auto dst = sc.station_index(cols[3]);
      if (!src || !dst) throw fail("unknown station");
      bool found = false;
      for (std::size_t c = 0; c < sc.connections.size(); ++c) {
        if (sc.connections[c].src == *src && sc.connections[c].dst == *dst) {
          r.connection = c;
          found = true;
          break;
        }
      }
      if (!found) throw fail("connection not in scenario");
      for (const auto& id : split(cols[5], ';')) r.satellites.push_back(static_cast<NodeId>(std::stoul(id)));
      if (r.satellites.empty() || r.satellites.front() != std::stoul(cols[4])) throw fail("src_sat/hop_list mismatch");
      r.latency_ms = std::stod(cols[6]);
      if (std::stoul(cols[7]) != r.hops()) throw fail("hops/hop_list mismatch");
      if (cols[8] == "delivered") {
        r.status = PathStatus::delivered;
      } else if (cols[8] == "dropped:loop") {
        r.status = PathStatus::dropped;
        r.drop_reason = DropReason::loop;
      } else if (cols[8] == "dropped:dead-end") {
        r.status = PathStatus::dropped;
        r.drop_reason = DropReason::dead_end;
      } else {
        throw fail("unknown status '" + cols[8] + "'");
      }
    } catch (const ExportError&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string optional_text(const std::optional<double>& v, int precision = 6) {
  return v ? format_fixed(*v, precision) : "";
}

inline void write_connections_csv(std::ostream& os, const Scenario& sc, const MetricsReport& report) {
  os << "t,algorithm,src_station,dst_station,valid,paths,dropped,latency_min_ms,latency_avg_ms,"
        "latency_max_ms,hops_min,hops_avg,hops_max,gamma,vertex_change,geodesic_latency_ms\n";
  for (const auto& s : report.series) {
    const auto& conn = sc.connections[s.connection];
    for (std::size_t k = 0; k < s.stamps.size(); ++k) {
      const auto& m = s.stamps[k];
      os << format_fixed(stamp_offset_s(sc, k), 3) << ',' << to_string(s.algorithm) << ','
         << sc.stations[conn.src].name << ',' << sc.stations[conn.dst].name << ',' << (m.valid ? 1 : 0) << ','
         << m.delivered << ',' << m.dropped << ',';
      if (m.valid) {
        os << format_fixed(m.latency_ms.min) << ',' << format_fixed(m.latency_ms.avg) << ','
           << format_fixed(m.latency_ms.max) << ',' << format_fixed(m.hops.min, 0) << ','
           << format_fixed(m.hops.avg, 4) << ',' << format_fixed(m.hops.max, 0) << ',';
      } else {
        os << ",,,,,,";
      }
      os << optional_text(m.gamma) << ',' << (m.vertex_change ? std::to_string(*m.vertex_change) : "") << ','
         << format_fixed(geodesic_latency_ms(m.geodesic_km)) << '\n';
    }
  }
}

inline void write_summary_csv(std::ostream& os, const Scenario& sc, const MetricsReport& report) {
  os << "algorithm,src_station,dst_station,valid_stamps,invalid_stamps,reachable_probability,"
        "latency_min_ms,latency_avg_ms,latency_max_ms,hops_min,hops_avg,hops_max,geodesic_latency_ms,"
        "median_gamma,evolution_le20_fraction,max_stretch,edge_links_in_latency\n";
  for (const auto& s : report.series) {
    const auto& conn = sc.connections[s.connection];
    const ConnectionSummary sum = summarize(s);
    os << to_string(s.algorithm) << ',' << sc.stations[conn.src].name << ',' << sc.stations[conn.dst].name << ','
       << sum.valid_stamps << ',' << sum.invalid_stamps << ',' << format_fixed(sum.reachable_probability) << ',';
    if (sum.latency_ms) {
      os << format_fixed(sum.latency_ms->min) << ',' << format_fixed(sum.latency_ms->avg) << ','
         << format_fixed(sum.latency_ms->max) << ',' << format_fixed(sum.hops->min, 0) << ','
         << format_fixed(sum.hops->avg, 4) << ',' << format_fixed(sum.hops->max, 0) << ',';
    } else {
      os << ",,,,,,";
    }
    os << format_fixed(sum.mean_geodesic_latency_ms) << ',' << optional_text(sum.median_gamma) << ','
       << optional_text(sum.evolution_le20_fraction) << ',' << optional_text(sum.max_stretch) << ','
       << (report.edge_links_in_latency ? 1 : 0) << '\n';
  }
}

// Empirical CDF tables keyed by series label.
inline void write_cdf_csv(std::ostream& os, const std::map<std::string, std::vector<double>>& samples) {
  os << "series,value,fraction\n";
  for (const auto& [label, values] : samples)
    for (const auto& p : empirical_cdf(values))
      os << label << ',' << format_fixed(p.value) << ',' << format_fixed(p.fraction) << '\n';
}

// Per-algorithm pooled samples for CDF export.
struct ReportSamples {
  std::map<std::string, std::vector<double>> stretch, hops, gamma, vertex_change, latency_ms;
};

inline ReportSamples collect_samples(const Scenario& sc, std::span<const PathRecord> records,
                                     const MetricsReport& report) {
  ReportSamples out;
  for (const auto& r : records) {
    if (r.status != PathStatus::delivered) continue;
    const std::string label(to_string(r.algorithm));
    out.hops[label].push_back(static_cast<double>(r.hops()));
    out.latency_ms[label].push_back(r.latency_ms);
  }
  for (const auto& s : report.series) {
    const std::string label(to_string(s.algorithm));
    for (const auto& m : s.stamps) {
      out.stretch[label].insert(out.stretch[label].end(), m.stretches.begin(), m.stretches.end());
      if (m.gamma) out.gamma[label].push_back(*m.gamma);
      if (m.vertex_change) out.vertex_change[label].push_back(static_cast<double>(*m.vertex_change));
    }
  }
  (void)sc;
  return out;
}

// ---------------------------------------------------------------------------
// Topology

inline void write_edges_header(std::ostream& os) { os << "t,src,dst,kind,length_km,latency_ms\n"; }

inline void write_edges_csv(std::ostream& os, const Snapshot& snap) {
  const std::string t = format_fixed(seconds_between(snap.epoch, snap.time), 3);
  for (const Link& l : snap.links) {
    os << t << ',' << snap.node_name(l.a) << ',' << snap.node_name(l.b) << ',' << to_string(l.kind) << ','
       << format_fixed(l.length_km) << ',' << format_fixed(l.latency_ms) << '\n';
  }
}

inline void write_histogram_csv(std::ostream& os, const DirectionHistogram& h) {
  os << "alpha_low_deg,alpha_high_deg,h\n";
  for (std::size_t i = 0; i < h.size(); ++i) os << i << ',' << i + 1 << ',' << format_exact(h[i]) << '\n';
}

inline void write_eisl_csv(std::ostream& os, std::span<const EislEpisode> episodes, const TimeGrid& grid,
                           int sats_per_plane) {
  os << "first_stamp,sat_a,sat_b,stamps,duration_s\n";
  auto name = [sats_per_plane](NodeId v) {
    return "S" + std::to_string(v / sats_per_plane) + "_" + std::to_string(v % sats_per_plane);
  };
  for (const auto& e : episodes) {
    os << e.first_stamp << ',' << name(e.pair.a) << ',' << name(e.pair.b) << ',' << e.stamps << ','
       << format_fixed(grid.step_s * static_cast<double>(e.stamps), 3) << '\n';
  }
}

inline nlohmann::json lonlat(const GeodeticPoint& g) {
  return nlohmann::json::array({g.lon_deg, g.lat_deg});
}

inline GeodeticPoint node_geodetic(const Snapshot& snap, NodeId v) {
  if (!snap.is_satellite(v)) return snap.stations.at(v - snap.satellite_count).geodetic;
  return ecef_to_geodetic(eci_to_ecef(snap.positions[v], snap.time, snap.epoch));
}

inline nlohmann::json snapshot_geojson(const Snapshot& snap) {
  using nlohmann::json;
  json features = json::array();
  for (NodeId v = 0; v < snap.node_count(); ++v) {
    const GeodeticPoint g = node_geodetic(snap, v);
    json props = {{"name", snap.node_name(v)}, {"alt_km", g.alt_km}};
    props["role"] = snap.is_satellite(v)
                        ? "satellite"
                        : (snap.stations[v - snap.satellite_count].kind == StationKind::ground ? "ground" : "mobile");
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", lonlat(g)}}},
                        {"properties", props}});
  }
  for (const Link& l : snap.links) {
    features.push_back({{"type", "Feature"},
                        {"geometry",
                         {{"type", "LineString"},
                          {"coordinates", json::array({lonlat(node_geodetic(snap, l.a)), lonlat(node_geodetic(snap, l.b))})}}},
                        {"properties",
                         {{"kind", std::string(to_string(l.kind))},
                          {"src", snap.node_name(l.a)},
                          {"dst", snap.node_name(l.b)},
                          {"length_km", l.length_km},
                          {"latency_ms", l.latency_ms}}}});
  }
  return {{"type", "FeatureCollection"},
          {"properties", {{"t", seconds_between(snap.epoch, snap.time)}, {"utc", format_utc(snap.time)}}},
          {"features", features}};
}

// LineStrings station -> satellites -> station for each record.
inline nlohmann::json paths_geojson(const Scenario& sc, std::span<const PathRecord> records) {
  using nlohmann::json;
  const Constellation constellation(sc.constellation);
  const UtcTime epoch = sc.constellation.epoch;
  json features = json::array();
  for (const auto& r : records) {
    const UtcTime t = sc.time.stamp(r.stamp);
    const auto& conn = sc.connections.at(r.connection);
    json coords = json::array();
    coords.push_back(lonlat(sc.stations[conn.src].position_at(t)));
    for (NodeId s : r.satellites) {
      coords.push_back(lonlat(ecef_to_geodetic(eci_to_ecef(constellation.state_of(s, t).position, t, epoch))));
    }
    if (r.status == PathStatus::delivered) coords.push_back(lonlat(sc.stations[conn.dst].position_at(t)));
    const std::size_t vertices = coords.size();
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                        {"properties",
                         {{"t", stamp_offset_s(sc, r.stamp)},
                          {"algorithm", std::string(to_string(r.algorithm))},
                          {"src_station", sc.stations[conn.src].name},
                          {"dst_station", sc.stations[conn.dst].name},
                          {"src_sat", r.src_sat()},
                          {"isl_hops", r.hops()},
                          {"hop_count", vertices - 1},
                          {"latency_ms", r.latency_ms},
                          {"status", status_text(r.status, r.drop_reason)}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

// ---------------------------------------------------------------------------
// Files

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw ExportError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExportError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw ExportError("write failed for '" + path.string() + "'");
}

template <typename Fn>
void write_with(const std::filesystem::path& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_text_file(path, os.str());
}

}  // namespace leonet
