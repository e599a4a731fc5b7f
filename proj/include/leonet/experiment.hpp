#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "leonet/metrics.hpp"
#include "leonet/routing.hpp"
#include "leonet/scenario.hpp"
#include "leonet/topology.hpp"

namespace leonet {

// One traced or computed path, as logged to paths.csv.
struct PathRecord {
  std::size_t stamp{0};
  Algorithm algorithm{Algorithm::sp};
  std::size_t connection{0};
  std::vector<NodeId> satellites;
  double latency_ms{0.0};  // end to end, edge links included
  PathStatus status{PathStatus::delivered};
  std::optional<DropReason> drop_reason;

  NodeId src_sat() const { return satellites.front(); }
  std::size_t hops() const { return satellites.empty() ? 0 : satellites.size() - 1; }
  double length_km() const { return latency_ms * kLightSpeedKmPerMs; }
};

struct StampMetrics {
  bool valid{false};
  bool reachable{false};
  std::size_t delivered{0};
  std::size_t dropped{0};
  SeriesStats latency_ms;
  SeriesStats hops;
  std::optional<double> gamma;
  std::optional<std::size_t> vertex_change;  // against the previous stamp
  double geodesic_km{0.0};
  std::vector<double> stretches;
};

struct ConnectionSeries {
  std::size_t connection{0};
  Algorithm algorithm{Algorithm::sp};
  std::vector<StampMetrics> stamps;
};

struct ConnectionSummary {
  std::size_t valid_stamps{0};
  std::size_t invalid_stamps{0};
  double reachable_probability{0.0};
  std::optional<SeriesStats> latency_ms;  // min of mins, mean of means, max of maxes
  std::optional<SeriesStats> hops;
  double mean_geodesic_latency_ms{0.0};
  std::optional<double> median_gamma;
  std::optional<double> evolution_le20_fraction;
  std::optional<double> max_stretch;
};

struct MetricsReport {
  std::vector<ConnectionSeries> series;  // connection-major, scenario algorithm order
  // Reported latencies include the up- and down-link legs.
  bool edge_links_in_latency{true};

  const ConnectionSeries& find(std::size_t connection, Algorithm a) const {
    for (const auto& s : series)
      if (s.connection == connection && s.algorithm == a) return s;
    throw std::out_of_range("no series for connection/algorithm");
  }
};

inline ConnectionSummary summarize(const ConnectionSeries& s) {
  ConnectionSummary out;
  std::vector<double> mins, avgs, maxs, hmin, havg, hmax, geo, gammas, changes, stretches;
  std::size_t reach = 0;
  for (const auto& st : s.stamps) {
    geo.push_back(geodesic_latency_ms(st.geodesic_km));
    reach += st.reachable ? 1 : 0;
    if (!st.valid) {
      ++out.invalid_stamps;
      continue;
    }
    ++out.valid_stamps;
    mins.push_back(st.latency_ms.min);
    avgs.push_back(st.latency_ms.avg);
    maxs.push_back(st.latency_ms.max);
    hmin.push_back(st.hops.min);
    havg.push_back(st.hops.avg);
    hmax.push_back(st.hops.max);
    if (st.gamma) gammas.push_back(*st.gamma);
    if (st.vertex_change) changes.push_back(static_cast<double>(*st.vertex_change));
    stretches.insert(stretches.end(), st.stretches.begin(), st.stretches.end());
  }
  if (!s.stamps.empty()) {
    out.reachable_probability = static_cast<double>(reach) / static_cast<double>(s.stamps.size());
    out.mean_geodesic_latency_ms = summarize(std::span<const double>(geo)).avg;
  }
  if (!avgs.empty()) {
    out.latency_ms = SeriesStats{summarize(std::span<const double>(mins)).min,
                                 summarize(std::span<const double>(avgs)).avg,
                                 summarize(std::span<const double>(maxs)).max, avgs.size()};
    out.hops = SeriesStats{summarize(std::span<const double>(hmin)).min,
                           summarize(std::span<const double>(havg)).avg,
                           summarize(std::span<const double>(hmax)).max, havg.size()};
  }
  if (!gammas.empty()) out.median_gamma = median(gammas);
  if (!changes.empty()) out.evolution_le20_fraction = fraction_at_most(changes, 20.0);
  if (!stretches.empty()) out.max_stretch = *std::max_element(stretches.begin(), stretches.end());
  return out;
}

// Metrics from path logs alone; simulate and analyze share this.
inline MetricsReport compute_report(const Scenario& sc, std::span<const PathRecord> records) {
  MetricsReport report;
  const std::size_t stamps = sc.time.count;
  std::map<std::pair<std::size_t, Algorithm>, std::vector<std::vector<const PathRecord*>>> grouped;
  for (std::size_t c = 0; c < sc.connections.size(); ++c)
    for (Algorithm a : sc.algorithms) grouped[{c, a}].assign(stamps, {});
  for (const auto& r : records) {
    auto it = grouped.find({r.connection, r.algorithm});
    if (it == grouped.end() || r.stamp >= stamps) {
      throw std::invalid_argument("path record outside scenario connections/algorithms/time grid");
    }
    if (r.status == PathStatus::delivered) it->second[r.stamp].push_back(&r);
  }

  std::vector<double> geodesic(stamps * sc.connections.size(), 0.0);
  for (std::size_t k = 0; k < stamps; ++k) {
    const UtcTime t = sc.time.stamp(k);
    for (std::size_t c = 0; c < sc.connections.size(); ++c) {
      const auto& conn = sc.connections[c];
      geodesic[k * sc.connections.size() + c] =
          geodesic_distance(sc.stations[conn.src].position_at(t), sc.stations[conn.dst].position_at(t));
    }
  }

  for (std::size_t c = 0; c < sc.connections.size(); ++c) {
    for (Algorithm a : sc.algorithms) {
      ConnectionSeries series;
      series.connection = c;
      series.algorithm = a;
      std::vector<Path> previous;
      bool previous_valid = false;
      for (std::size_t k = 0; k < stamps; ++k) {
        const auto& delivered = grouped[{c, a}][k];
        StampMetrics m;
        m.geodesic_km = geodesic[k * sc.connections.size() + c];
        m.delivered = delivered.size();
        m.valid = !delivered.empty();
        m.reachable = m.valid;
        std::vector<Path> paths;
        if (m.valid) {
          std::vector<double> lat, hop;
          for (const PathRecord* r : delivered) {
            lat.push_back(r->latency_ms);
            hop.push_back(static_cast<double>(r->hops()));
            if (m.geodesic_km > 0.0) m.stretches.push_back(stretch(r->length_km(), m.geodesic_km));
            Path p;
            p.satellites = r->satellites;
            paths.push_back(std::move(p));
          }
          m.latency_ms = summarize(std::span<const double>(lat));
          m.hops = summarize(std::span<const double>(hop));
          bool has_edge = false;
          for (const Path& p : paths) has_edge |= p.satellites.size() > 1;
          if (has_edge) m.gamma = path_independence(paths);
          if (previous_valid) m.vertex_change = path_evolution(previous, paths);
        }
        previous = std::move(paths);
        previous_valid = m.valid;
        series.stamps.push_back(std::move(m));
      }
      report.series.push_back(std::move(series));
    }
  }
  std::map<std::pair<std::size_t, Algorithm>, std::size_t> index;
  for (std::size_t i = 0; i < report.series.size(); ++i)
    index[{report.series[i].connection, report.series[i].algorithm}] = i;
  for (const auto& r : records)
    if (r.status == PathStatus::dropped) ++report.series[index.at({r.connection, r.algorithm})].stamps[r.stamp].dropped;
  return report;
}

inline std::vector<ReachabilityRecord> reachability_records(const MetricsReport& report, Algorithm a) {
  std::vector<ReachabilityRecord> out;
  for (const auto& s : report.series) {
    if (s.algorithm != a) continue;
    for (std::size_t k = 0; k < s.stamps.size(); ++k) out.push_back({s.connection, k, s.stamps[k].reachable});
  }
  return out;
}

struct StampFailure {
  std::size_t stamp{0};
  std::string message;
};

struct ExperimentResult {
  std::vector<PathRecord> records;
  MetricsReport report;
  std::vector<StampFailure> failures;
  std::vector<LocationTable> location_tables;  // one per station (LER)
};

namespace detail {

struct StampOutput {
  std::vector<PathRecord> records;
  std::vector<MplfHeader> delivered_headers;  // (connection order) for egress bookkeeping
  std::vector<std::size_t> delivered_to;      // station index per header
  std::optional<std::string> error;
};

inline void append_records(std::vector<PathRecord>& out, const PathSet& set, std::size_t stamp, Algorithm a,
                           std::size_t connection) {
  for (const auto* list : {&set.paths, &set.dropped}) {
    for (const Path& p : *list) {
      PathRecord r;
      r.stamp = stamp;
      r.algorithm = a;
      r.connection = connection;
      r.satellites = p.satellites;
      r.latency_ms = p.end_to_end_latency_ms();
      r.status = p.status;
      r.drop_reason = p.drop_reason;
      out.push_back(std::move(r));
    }
  }
}

}  // namespace detail

// Runs every stamp of the scenario. Stamps are independent and may run on
// `parallel` threads; outputs are merged in stamp order.
inline ExperimentResult run_experiment(const Scenario& sc, unsigned parallel = 1) {
  const Constellation constellation(sc.constellation);
  const auto isl_template = build_persistent_isls(constellation, sc.pattern);
  const UtcTime epoch = sc.constellation.epoch;
  const std::size_t stamps = sc.time.count;
  const std::size_t max_hops = sc.resolved_max_hops();

  ExperimentResult result;
  result.location_tables.resize(sc.stations.size());

  // Ingress bookkeeping in stamp order: the source LER learns the
  // destination's position (location-server lookup modelled as a refresh of
  // the local table) and freezes the header.
  std::vector<std::vector<MplfHeader>> headers(stamps);
  for (std::size_t k = 0; k < stamps; ++k) {
    const UtcTime t = sc.time.stamp(k);
    for (const auto& conn : sc.connections) {
      const Station& src = sc.stations[conn.src];
      const Station& dst = sc.stations[conn.dst];
      LocationTable& table = result.location_tables[conn.src];
      table.update(dst.ei, geodetic_to_ecef(dst.position_at(t)), t);
      headers[k].push_back(
          ler_encapsulate(table, dst.ei, src.ei, geodetic_to_ecef(src.position_at(t)), t, epoch));
    }
  }

  std::vector<detail::StampOutput> outputs(stamps);
  auto work = [&](std::size_t k) {
    detail::StampOutput& out = outputs[k];
    try {
      const Snapshot snap =
          make_snapshot(constellation, sc.stations, isl_template, sc.time.stamp(k), sc.snapshot_options());
      TreeCache cache;
      for (std::size_t c = 0; c < sc.connections.size(); ++c) {
        const auto& conn = sc.connections[c];
        for (Algorithm a : sc.algorithms) {
          const PathSet set = enumerate_paths(snap, a, conn.src, conn.dst, &headers[k][c], max_hops, &cache);
          detail::append_records(out.records, set, k, a, c);
          if (is_mplf(a) && !set.paths.empty()) {
            out.delivered_headers.push_back(headers[k][c]);
            out.delivered_to.push_back(conn.dst);
          }
        }
      }
    } catch (const std::exception& e) {
      out.records.clear();
      out.error = e.what();
    }
  };

  const unsigned threads = std::max(1u, parallel);
  if (threads == 1 || stamps < 2) {
    for (std::size_t k = 0; k < stamps; ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < stamps; k = next++) work(k);
      });
    }
  }

  for (std::size_t k = 0; k < stamps; ++k) {
    auto& out = outputs[k];
    if (out.error) {
      result.failures.push_back({k, *out.error});
      continue;
    }
    for (std::size_t i = 0; i < out.delivered_headers.size(); ++i)
      ler_receive(result.location_tables[out.delivered_to[i]], out.delivered_headers[i], epoch);
    std::move(out.records.begin(), out.records.end(), std::back_inserter(result.records));
  }
  result.report = compute_report(sc, result.records);
  return result;
}

}  // namespace leonet
