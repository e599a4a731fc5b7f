#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leonet/constellation.hpp"
#include "leonet/geometry.hpp"
#include "leonet/trajectory.hpp"

namespace leonet {

using NodeId = std::uint32_t;

enum class GridKind { plus, star };

inline std::string_view to_string(GridKind g) { return g == GridKind::plus ? "+Grid" : "*Grid"; }

inline GridKind parse_grid_kind(std::string_view s) {
  if (s == "+Grid" || s == "+grid" || s == "plus") return GridKind::plus;
  if (s == "*Grid" || s == "*grid" || s == "star") return GridKind::star;
  throw std::invalid_argument("unknown grid kind: " + std::string(s));
}

// Persistent ISL pattern. Each bias b links (p, n) with (p + 1, n + b).
struct IslPattern {
  GridKind grid{GridKind::plus};
  std::vector<int> bias{0};

  void validate() const {
    for (int b : bias) {
      if (b != 0 && b != -1) throw std::invalid_argument("pattern.bias entries must be 0 or -1");
    }
    std::vector<int> sorted = bias;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("pattern.bias has duplicate entries");
    }
    if (grid == GridKind::plus && bias.size() != 1) {
      throw std::invalid_argument("+Grid requires exactly one bias (B={0} or B={-1})");
    }
    if (grid == GridKind::star && sorted != std::vector<int>{-1, 0}) {
      throw std::invalid_argument("*Grid requires B={-1,0}");
    }
  }
};

enum class LinkKind { iisl, sisl, eisl, gsl, msl };

inline std::string_view to_string(LinkKind k) {
  switch (k) {
    case LinkKind::iisl: return "iISL";
    case LinkKind::sisl: return "sISL";
    case LinkKind::eisl: return "eISL";
    case LinkKind::gsl: return "GSL";
    case LinkKind::msl: return "MSL";
  }
  return "?";
}

inline bool is_isl(LinkKind k) { return k == LinkKind::iisl || k == LinkKind::sisl || k == LinkKind::eisl; }

struct NodePair {
  NodeId a{0};
  NodeId b{0};

  static NodePair canonical(NodeId x, NodeId y) { return x < y ? NodePair{x, y} : NodePair{y, x}; }
  friend constexpr auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct Link {
  NodeId a{0};  // a < b
  NodeId b{0};
  LinkKind kind{LinkKind::iisl};
  double length_km{0.0};
  double latency_ms{0.0};

  NodeId other(NodeId v) const noexcept { return v == a ? b : a; }
};

inline Link make_link(NodeId x, NodeId y, LinkKind kind, double length_km) {
  if (x == y) throw std::invalid_argument("self-link rejected");
  if (!(length_km > 0.0)) throw std::invalid_argument("link length must be > 0");
  const NodePair p = NodePair::canonical(x, y);
  return {p.a, p.b, kind, length_km, propagation_latency_ms(length_km)};
}

struct PersistentIsl {
  NodePair pair;
  LinkKind kind{LinkKind::iisl};
  friend constexpr bool operator==(const PersistentIsl&, const PersistentIsl&) = default;
};

// Time-invariant node-pair template of iISLs and sISLs, sorted by pair.
inline std::vector<PersistentIsl> build_persistent_isls(const Constellation& c, const IslPattern& pattern) {
  pattern.validate();
  const int n = c.config().sats_per_plane;
  const int p = c.config().planes;
  if (n < 2) throw std::invalid_argument("iISL construction needs at least 2 satellites per plane");

  std::map<NodePair, LinkKind> pairs;
  auto flat = [n](int plane, int slot) { return static_cast<NodeId>(plane * n + slot); };
  auto wrap = [](int v, int m) { return ((v % m) + m) % m; };
  for (int plane = 0; plane < p; ++plane) {
    for (int slot = 0; slot < n; ++slot) {
      const NodeId self = flat(plane, slot);
      pairs.emplace(NodePair::canonical(self, flat(plane, wrap(slot + 1, n))), LinkKind::iisl);
      if (p < 2) continue;
      for (int b : pattern.bias) {
        const NodeId side = flat(wrap(plane + 1, p), wrap(slot + b, n));
        if (side != self) pairs.emplace(NodePair::canonical(self, side), LinkKind::sisl);
      }
    }
  }
  std::vector<PersistentIsl> out;
  out.reserve(pairs.size());
  for (const auto& [pair, kind] : pairs) out.push_back({pair, kind});
  return out;
}

enum class StationKind { ground, mobile };

struct Station {
  std::string name;
  std::string ei;  // equipment identifier, unique
  StationKind kind{StationKind::ground};
  std::variant<GeodeticPoint, Trajectory> location;

  GeodeticPoint position_at(UtcTime t) const {
    if (const auto* fixed = std::get_if<GeodeticPoint>(&location)) return *fixed;
    return std::get<Trajectory>(location).position_at(t);
  }
};

inline void validate_stations(std::span<const Station> stations) {
  std::vector<std::string> eis;
  for (const auto& s : stations) eis.push_back(s.ei);
  std::sort(eis.begin(), eis.end());
  if (std::adjacent_find(eis.begin(), eis.end()) != eis.end()) {
    throw std::invalid_argument("station equipment identifiers must be unique");
  }
}

struct SnapshotOptions {
  double min_elevation_deg{40.0};
  // Age of the neighbour positions satellites exchange; 0 = exact positions.
  double beacon_staleness_s{0.0};
};

struct Adjacent {
  NodeId node{0};
  std::uint32_t link{0};
};

struct StationInfo {
  std::string name;
  std::string ei;
  StationKind kind{StationKind::ground};
  GeodeticPoint geodetic;
};

// Network graph at one time stamp. Nodes [0, satellites) are satellites in
// flat (plane * N + slot) order, followed by the stations in input order.
class Snapshot {
 public:
  UtcTime time{};
  UtcTime epoch{};
  std::uint32_t satellite_count{0};
  int sats_per_plane{1};
  std::vector<StationInfo> stations;
  std::vector<Vec3> positions;          // ECI, every node
  std::vector<Vec3> velocities;         // ECI, satellites only
  std::vector<Vec3> beacon_positions;   // satellites only, as seen by neighbours
  std::vector<Link> links;
  std::vector<std::vector<Adjacent>> adjacency;  // sorted by neighbour id

  std::size_t node_count() const noexcept { return positions.size(); }
  bool is_satellite(NodeId v) const noexcept { return v < satellite_count; }
  NodeId station_node(std::size_t station_index) const {
    return satellite_count + static_cast<NodeId>(station_index);
  }
  std::optional<std::size_t> station_index_by_ei(std::string_view ei) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i].ei == ei) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> station_index_by_name(std::string_view name) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i].name == name) return i;
    return std::nullopt;
  }

  std::span<const Adjacent> neighbors(NodeId v) const { return adjacency.at(v); }

  const Link* find_link(NodeId x, NodeId y) const {
    for (const Adjacent& adj : adjacency.at(x))
      if (adj.node == y) return &links[adj.link];
    return nullptr;
  }

  // V_adj(station) restricted to satellites, ascending.
  std::vector<NodeId> associated_satellites(std::size_t station_index) const {
    std::vector<NodeId> out;
    for (const Adjacent& adj : adjacency.at(station_node(station_index)))
      if (is_satellite(adj.node)) out.push_back(adj.node);
    return out;
  }

  bool covered(std::size_t station_index) const { return !associated_satellites(station_index).empty(); }

  std::string node_name(NodeId v) const {
    if (is_satellite(v)) {
      return "S" + std::to_string(v / sats_per_plane) + "_" + std::to_string(v % sats_per_plane);
    }
    return stations.at(v - satellite_count).name;
  }

  void rebuild_adjacency() {
    adjacency.assign(positions.size(), {});
    for (std::uint32_t i = 0; i < links.size(); ++i) {
      adjacency.at(links[i].a).push_back({links[i].b, i});
      adjacency.at(links[i].b).push_back({links[i].a, i});
    }
    for (auto& list : adjacency)
      std::sort(list.begin(), list.end(), [](const Adjacent& l, const Adjacent& r) { return l.node < r.node; });
  }
};

// Connect-all-visible edge links from each station to every satellite at or
// above the elevation mask. Positions share one frame.
inline std::vector<Link> build_edge_links(std::span<const Vec3> satellite_positions,
                                          std::span<const Vec3> station_positions,
                                          std::span<const StationKind> station_kinds,
                                          double min_elevation_deg) {
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0)) {
    throw std::invalid_argument("min_elevation must lie in [0, 90)");
  }
  const auto sat_count = static_cast<NodeId>(satellite_positions.size());
  std::vector<Link> out;
  for (std::size_t g = 0; g < station_positions.size(); ++g) {
    const LinkKind kind = station_kinds[g] == StationKind::ground ? LinkKind::gsl : LinkKind::msl;
    for (NodeId s = 0; s < sat_count; ++s) {
      if (elevation_angle(station_positions[g], satellite_positions[s]) >= min_elevation_deg) {
        out.push_back(make_link(s, sat_count + static_cast<NodeId>(g), kind,
                                distance(station_positions[g], satellite_positions[s])));
      }
    }
  }
  return out;
}

inline Snapshot make_snapshot(const Constellation& constellation, std::span<const Station> stations,
                              std::span<const PersistentIsl> isl_template, UtcTime t,
                              const SnapshotOptions& options = {}) {
  Snapshot snap;
  snap.time = t;
  snap.epoch = constellation.config().epoch;
  snap.satellite_count = static_cast<std::uint32_t>(constellation.size());
  snap.sats_per_plane = constellation.config().sats_per_plane;

  const auto states = constellation.states_at(t);
  snap.positions.reserve(states.size() + stations.size());
  for (const auto& s : states) {
    snap.positions.push_back(s.position);
    snap.velocities.push_back(s.velocity);
  }
  if (options.beacon_staleness_s == 0.0) {
    snap.beacon_positions = snap.positions;
  } else {
    for (const auto& s : constellation.states_at(add_seconds(t, -options.beacon_staleness_s)))
      snap.beacon_positions.push_back(s.position);
  }

  std::vector<Vec3> station_positions;
  std::vector<StationKind> kinds;
  for (const auto& st : stations) {
    const GeodeticPoint g = st.position_at(t);
    snap.stations.push_back({st.name, st.ei, st.kind, g});
    station_positions.push_back(ecef_to_eci(geodetic_to_ecef(g), t, snap.epoch));
    kinds.push_back(st.kind);
  }
  snap.positions.insert(snap.positions.end(), station_positions.begin(), station_positions.end());

  snap.links.reserve(isl_template.size());
  for (const auto& isl : isl_template) {
    snap.links.push_back(make_link(isl.pair.a, isl.pair.b, isl.kind,
                                   distance(snap.positions[isl.pair.a], snap.positions[isl.pair.b])));
  }
  auto edges = build_edge_links(std::span(snap.positions).first(snap.satellite_count), station_positions,
                                kinds, options.min_elevation_deg);
  snap.links.insert(snap.links.end(), edges.begin(), edges.end());
  snap.rebuild_adjacency();
  return snap;
}

inline Snapshot make_snapshot(const Constellation& constellation, std::span<const Station> stations,
                              const IslPattern& pattern, UtcTime t, const SnapshotOptions& options = {}) {
  const auto isl_template = build_persistent_isls(constellation, pattern);
  return make_snapshot(constellation, stations, isl_template, t, options);
}

// Satellite pairs from crossing meshes (ascending vs descending) closer than
// `threshold_km` that share no persistent ISL. Statistics only; never routed.
inline std::vector<NodePair> detect_eisls(const Snapshot& snap, double threshold_km) {
  if (!(threshold_km > 0.0)) throw std::invalid_argument("eISL threshold L_h must be > 0");
  std::vector<NodePair> out;
  const double limit2 = threshold_km * threshold_km;
  for (NodeId i = 0; i < snap.satellite_count; ++i) {
    const bool ascending_i = snap.velocities[i].z > 0.0;
    for (NodeId j = i + 1; j < snap.satellite_count; ++j) {
      const bool ascending_j = snap.velocities[j].z > 0.0;
      if (ascending_i == ascending_j) continue;
      if (snap.velocities[i].z == 0.0 || snap.velocities[j].z == 0.0) continue;
      const Vec3 d = snap.positions[i] - snap.positions[j];
      if (dot(d, d) >= limit2) continue;
      if (snap.find_link(i, j) != nullptr) continue;
      out.push_back({i, j});
    }
  }
  return out;
}

struct EislEpisode {
  NodePair pair;
  std::size_t first_stamp{0};
  std::size_t stamps{0};  // consecutive stamps with the pair in range
};

// Folds per-stamp eISL sets into contiguous per-pair episodes.
class EislEpisodeTracker {
 public:
  void observe(std::size_t stamp, std::span<const NodePair> active) {
    std::map<NodePair, EislEpisode> next;
    for (const NodePair& p : active) {
      auto it = open_.find(p);
      if (it != open_.end() && it->second.first_stamp + it->second.stamps == stamp) {
        EislEpisode e = it->second;
        ++e.stamps;
        next.emplace(p, e);
      } else {
        next.emplace(p, EislEpisode{p, stamp, 1});
      }
    }
    for (auto& [pair, ep] : open_)
      if (!next.contains(pair)) closed_.push_back(ep);
    open_ = std::move(next);
    counts_.push_back(active.size());
  }

  std::vector<EislEpisode> finish() {
    for (auto& [pair, ep] : open_) closed_.push_back(ep);
    open_.clear();
    std::sort(closed_.begin(), closed_.end(), [](const EislEpisode& l, const EislEpisode& r) {
      return l.first_stamp != r.first_stamp ? l.first_stamp < r.first_stamp : l.pair < r.pair;
    });
    return closed_;
  }

  const std::vector<std::size_t>& counts_per_stamp() const noexcept { return counts_; }

 private:
  std::map<NodePair, EislEpisode> open_;
  std::vector<EislEpisode> closed_;
  std::vector<std::size_t> counts_;
};

inline constexpr std::size_t kDirectionBins = 90;
using DirectionHistogram = std::array<double, kDirectionBins>;

inline std::size_t direction_bin(double alpha_rad) {
  const double deg = std::fabs(rad_to_deg(alpha_rad));
  return std::min<std::size_t>(kDirectionBins - 1, static_cast<std::size_t>(std::floor(deg)));
}

// h(alpha) of |alpha| in 1-degree bins, normalised per stamp and averaged over
// stamps. `kinds` selects the link families counted (default: all ISLs).
inline DirectionHistogram direction_histogram(std::span<const Snapshot> snapshots,
                                              std::span<const LinkKind> kinds = {}) {
  if (snapshots.empty()) throw std::invalid_argument("direction_histogram needs >= 1 snapshot");
  auto counted = [&](LinkKind k) {
    if (kinds.empty()) return is_isl(k);
    return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
  };
  DirectionHistogram total{};
  std::size_t used = 0;
  for (const Snapshot& snap : snapshots) {
    DirectionHistogram h{};
    std::size_t n = 0;
    for (const Link& l : snap.links) {
      if (!counted(l.kind)) continue;
      h[direction_bin(link_equator_angle(snap.positions[l.b] - snap.positions[l.a]))] += 1.0;
      ++n;
    }
    if (n == 0) continue;
    for (std::size_t i = 0; i < kDirectionBins; ++i) total[i] += h[i] / static_cast<double>(n);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("direction_histogram: no matching links in any snapshot");
  for (double& v : total) v /= static_cast<double>(used);
  return total;
}

}  // namespace leonet
