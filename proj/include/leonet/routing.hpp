#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leonet/geometry.hpp"
#include "leonet/topology.hpp"

namespace leonet {

enum class Algorithm { mplf_cpi, mplf_nfp, sp, lh };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::mplf_cpi: return "mplf-cpi";
    case Algorithm::mplf_nfp: return "mplf-nfp";
    case Algorithm::sp: return "sp";
    case Algorithm::lh: return "lh";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "mplf-cpi") return Algorithm::mplf_cpi;
  if (s == "mplf-nfp") return Algorithm::mplf_nfp;
  if (s == "sp") return Algorithm::sp;
  if (s == "lh") return Algorithm::lh;
  throw std::invalid_argument("unknown algorithm: " + std::string(s));
}

inline bool is_mplf(Algorithm a) { return a == Algorithm::mplf_cpi || a == Algorithm::mplf_nfp; }

enum class Strategy { cpi, nfp };

inline Strategy strategy_of(Algorithm a) {
  if (a == Algorithm::mplf_cpi) return Strategy::cpi;
  if (a == Algorithm::mplf_nfp) return Strategy::nfp;
  throw std::invalid_argument("not an MPLF algorithm");
}

// ---------------------------------------------------------------------------
// Location table and MPLF header

struct LocationEntry {
  EcefPoint position;
  UtcTime updated{};
};

class LocationTable {
 public:
  // Returns false (and keeps the entry) when `t` is older than the stored one.
  bool update(const std::string& ei, const EcefPoint& position, UtcTime t) {
    auto [it, inserted] = entries_.try_emplace(ei, LocationEntry{position, t});
    if (inserted) return true;
    if (t < it->second.updated) return false;
    it->second = {position, t};
    return true;
  }

  const LocationEntry* find(const std::string& ei) const {
    auto it = entries_.find(ei);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const LocationEntry& at(const std::string& ei) const {
    const LocationEntry* e = find(ei);
    if (e == nullptr) throw std::out_of_range("location table has no entry for EI '" + ei + "'");
    return *e;
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, LocationEntry> entries_;
};

struct MplfHeader {
  std::string dest_ei;
  Vec3 dest_saddr;    // ECI km, frozen at ingress
  std::string source_ei;
  Vec3 source_saddr;  // ECI km
  UtcTime ingress{};
};

// Ingress LER: ECEF->ECI conversion happens here only.
inline MplfHeader ler_encapsulate(const LocationTable& table, const std::string& dest_ei,
                                  const std::string& source_ei, const EcefPoint& source_position,
                                  UtcTime t, UtcTime epoch) {
  const LocationEntry& dest = table.at(dest_ei);
  MplfHeader h;
  h.dest_ei = dest_ei;
  h.dest_saddr = ecef_to_eci(dest.position, t, epoch);
  h.source_ei = source_ei;
  h.source_saddr = ecef_to_eci(source_position, t, epoch);
  h.ingress = t;
  return h;
}

// Egress LER bookkeeping on delivery: remember where the source was.
inline void ler_receive(LocationTable& table, const MplfHeader& header, UtcTime epoch) {
  table.update(header.source_ei, eci_to_ecef(header.source_saddr, header.ingress, epoch), header.ingress);
}

// ---------------------------------------------------------------------------
// Per-hop forwarding

struct Neighbor {
  NodeId id{0};
  Vec3 position;
};

enum class DropReason { dead_end, loop };

inline std::string_view to_string(DropReason r) { return r == DropReason::loop ? "loop" : "dead-end"; }

struct NextHop {
  NodeId neighbor{0};
  friend constexpr bool operator==(const NextHop&, const NextHop&) = default;
};
struct Deliver {
  std::string ei;
  friend bool operator==(const Deliver&, const Deliver&) = default;
};
struct Drop {
  DropReason reason{DropReason::dead_end};
  friend constexpr bool operator==(const Drop&, const Drop&) = default;
};

using ForwardDecision = std::variant<NextHop, Deliver, Drop>;

// Counts candidate evaluations made by one forwarding decision.
struct DecisionCounter {
  std::size_t comparisons{0};
};

namespace detail {

// Greedy selection shared by both strategies; `better(score, best)` orders
// candidates, ties go to the lower satellite id.
template <typename Score, typename Better>
ForwardDecision greedy_select(std::optional<NodeId> prev, std::span<const Neighbor> neighbors,
                              Score score, Better better, DecisionCounter* counter) {
  if (neighbors.empty()) return Drop{DropReason::dead_end};
  std::optional<NodeId> best;
  double best_score = 0.0;
  for (const Neighbor& n : neighbors) {
    const double s = score(n);
    if (counter != nullptr) ++counter->comparisons;
    if (!best || better(s, best_score) || (s == best_score && n.id < *best)) {
      best = n.id;
      best_score = s;
    }
  }
  if (prev && *best == *prev) return Drop{DropReason::loop};
  return NextHop{*best};
}

}  // namespace detail

// Compass routing: neighbour whose bearing makes the smallest angle with the
// bearing to the destination.
inline ForwardDecision forward_cpi(const Vec3& current, std::optional<NodeId> prev, const Vec3& dest,
                                   std::span<const Neighbor> neighbors,
                                   DecisionCounter* counter = nullptr) {
  const Vec3 to_dest = dest - current;
  const double dest_norm = norm(to_dest);
  auto cosine = [&](const Neighbor& n) {
    const Vec3 e = n.position - current;
    const double denom = norm(e) * dest_norm;
    return denom > 0.0 ? dot(e, to_dest) / denom : -1.0;
  };
  return detail::greedy_select(prev, neighbors, cosine, [](double s, double b) { return s > b; }, counter);
}

// Nearest-to-destination: neighbour with minimum distance to the destination.
inline ForwardDecision forward_nfp(const Vec3& current, std::optional<NodeId> prev, const Vec3& dest,
                                   std::span<const Neighbor> neighbors,
                                   DecisionCounter* counter = nullptr) {
  (void)current;
  auto dist = [&](const Neighbor& n) { return distance(n.position, dest); };
  return detail::greedy_select(prev, neighbors, dist, [](double s, double b) { return s < b; }, counter);
}

inline ForwardDecision forward(Strategy strategy, const Vec3& current, std::optional<NodeId> prev,
                               const Vec3& dest, std::span<const Neighbor> neighbors,
                               DecisionCounter* counter = nullptr) {
  return strategy == Strategy::cpi ? forward_cpi(current, prev, dest, neighbors, counter)
                                   : forward_nfp(current, prev, dest, neighbors, counter);
}

// Satellite neighbours of `sat` carrying their advertised (beacon) positions.
inline std::vector<Neighbor> satellite_neighbors(const Snapshot& snap, NodeId sat) {
  std::vector<Neighbor> out;
  for (const Adjacent& adj : snap.neighbors(sat)) {
    if (snap.is_satellite(adj.node)) out.push_back({adj.node, snap.beacon_positions[adj.node]});
  }
  return out;
}

// One LFR step: association-table hit delivers, otherwise forward greedily.
inline ForwardDecision mplf_step(const Snapshot& snap, Strategy strategy, NodeId current,
                                 std::optional<NodeId> prev, const MplfHeader& header,
                                 DecisionCounter* counter = nullptr) {
  if (const auto dest = snap.station_index_by_ei(header.dest_ei)) {
    if (snap.find_link(current, snap.station_node(*dest)) != nullptr) return Deliver{header.dest_ei};
  }
  const auto neighbors = satellite_neighbors(snap, current);
  return forward(strategy, snap.positions[current], prev, header.dest_saddr, neighbors, counter);
}

// ---------------------------------------------------------------------------
// Paths

enum class PathStatus { delivered, dropped };

inline std::string_view to_string(PathStatus s) { return s == PathStatus::delivered ? "delivered" : "dropped"; }

struct Path {
  std::vector<NodeId> satellites;
  std::vector<double> isl_lengths_km;
  double isl_latency_ms{0.0};  // left fold of per-link latencies
  double uplink_km{0.0};
  double downlink_km{0.0};
  PathStatus status{PathStatus::delivered};
  std::optional<DropReason> drop_reason;

  std::size_t hops() const noexcept { return isl_lengths_km.size(); }
  bool delivered() const noexcept { return status == PathStatus::delivered; }
  double total_length_km() const {
    double s = uplink_km;
    for (double l : isl_lengths_km) s += l;
    return s + downlink_km;
  }
  double end_to_end_latency_ms() const {
    return propagation_latency_ms(uplink_km) + isl_latency_ms + propagation_latency_ms(downlink_km);
  }
};

inline std::size_t default_max_hops(const ConstellationConfig& c) {
  return 4u * static_cast<std::size_t>(c.sats_per_plane + c.planes);
}

// Follows MPLF decisions from `src_sat` until delivery or drop.
inline Path trace_path(const Snapshot& snap, Strategy strategy, NodeId src_sat, const MplfHeader& header,
                       std::size_t max_hops, std::vector<DecisionCounter>* per_hop = nullptr) {
  if (max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");
  if (!snap.is_satellite(src_sat)) throw std::invalid_argument("trace source must be a satellite");
  const auto dest = snap.station_index_by_ei(header.dest_ei);
  if (!dest) throw std::invalid_argument("destination EI not present in snapshot: " + header.dest_ei);
  const NodeId dest_node = snap.station_node(*dest);

  Path path;
  path.satellites.push_back(src_sat);
  NodeId current = src_sat;
  std::optional<NodeId> prev;
  for (;;) {
    if (const Link* down = snap.find_link(current, dest_node)) {
      path.downlink_km = down->length_km;
      path.status = PathStatus::delivered;
      return path;
    }
    if (path.hops() >= max_hops) {
      path.status = PathStatus::dropped;
      path.drop_reason = DropReason::dead_end;
      return path;
    }
    DecisionCounter counter;
    const ForwardDecision d = mplf_step(snap, strategy, current, prev, header, &counter);
    if (per_hop != nullptr) per_hop->push_back(counter);
    if (const auto* drop = std::get_if<Drop>(&d)) {
      path.status = PathStatus::dropped;
      path.drop_reason = drop->reason;
      return path;
    }
    const NodeId next = std::get<NextHop>(d).neighbor;
    const Link* l = snap.find_link(current, next);
    path.isl_lengths_km.push_back(l->length_km);
    path.isl_latency_ms += l->latency_ms;
    path.satellites.push_back(next);
    prev = current;
    current = next;
  }
}

// ---------------------------------------------------------------------------
// Bellman-Ford baselines

enum class Weight { latency, unit };

struct GraphPath {
  std::vector<NodeId> nodes;
  std::vector<std::uint32_t> links;
  double cost{0.0};
};

// Single-source tree. Stations are never used as transit nodes. Among equal
// cost predecessors the lowest node id wins.
class ShortestPathTree {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

  ShortestPathTree(const Snapshot& snap, Weight weight, NodeId src) : src_(src) {
    const std::size_t n = snap.node_count();
    if (src >= n) throw std::out_of_range("bellman_ford: source outside snapshot");
    dist_.assign(n, kInf);
    pred_.assign(n, kNone);
    pred_link_.assign(n, 0);
    std::vector<char> queued(n, 0);
    std::vector<std::size_t> passes(n, 0);
    std::deque<NodeId> queue;
    dist_[src] = 0.0;
    queue.push_back(src);
    queued[src] = 1;
    // Queue-driven relaxation (Bellman-Ford with a work list).
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      queued[u] = 0;
      if (++passes[u] > n) throw std::logic_error("bellman_ford: negative cycle");
      if (u != src && !snap.is_satellite(u)) continue;
      for (const Adjacent& adj : snap.neighbors(u)) {
        const Link& l = snap.links[adj.link];
        const double w = weight == Weight::latency ? l.latency_ms : 1.0;
        const double cand = dist_[u] + w;
        const NodeId v = adj.node;
        if (cand < dist_[v]) {
          dist_[v] = cand;
          pred_[v] = u;
          pred_link_[v] = adj.link;
          if (!queued[v]) {
            queue.push_back(v);
            queued[v] = 1;
          }
        } else if (cand == dist_[v] && u < pred_[v] && v != src) {
          pred_[v] = u;
          pred_link_[v] = adj.link;
        }
      }
    }
  }

  NodeId source() const noexcept { return src_; }
  double distance_to(NodeId v) const { return dist_.at(v); }
  bool reachable(NodeId v) const { return dist_.at(v) < kInf; }

  std::optional<GraphPath> path_to(NodeId dst) const {
    if (!reachable(dst)) return std::nullopt;
    GraphPath p;
    p.cost = dist_[dst];
    for (NodeId v = dst; v != src_; v = pred_[v]) {
      p.nodes.push_back(v);
      p.links.push_back(pred_link_[v]);
    }
    p.nodes.push_back(src_);
    std::reverse(p.nodes.begin(), p.nodes.end());
    std::reverse(p.links.begin(), p.links.end());
    return p;
  }

 private:
  NodeId src_;
  std::vector<double> dist_;
  std::vector<NodeId> pred_;
  std::vector<std::uint32_t> pred_link_;
};

// SP (latency weight) or LH (unit weight); nullopt when unreachable.
inline std::optional<GraphPath> bellman_ford(const Snapshot& snap, Weight weight, NodeId src, NodeId dst) {
  return ShortestPathTree(snap, weight, src).path_to(dst);
}

// Converts a satellite-to-satellite graph path into a routed Path.
inline Path to_path(const Snapshot& snap, const GraphPath& gp) {
  Path p;
  p.satellites = gp.nodes;
  for (std::uint32_t li : gp.links) {
    p.isl_lengths_km.push_back(snap.links[li].length_km);
    p.isl_latency_ms += snap.links[li].latency_ms;
  }
  p.status = PathStatus::delivered;
  return p;
}

// ---------------------------------------------------------------------------
// Path sets between two stations

struct PathSet {
  std::vector<Path> paths;    // delivered
  std::vector<Path> dropped;  // MPLF traces that did not deliver
  std::size_t src_associated{0};
  std::size_t dst_associated{0};

  bool valid() const noexcept { return src_associated > 0 && dst_associated > 0 && !paths.empty(); }
};

struct RoutingOptions {
  std::size_t max_hops{0};  // 0 = 4 * (N + P)
};

using TreeCache = std::map<std::pair<NodeId, Weight>, ShortestPathTree>;

inline const ShortestPathTree& cached_tree(const Snapshot& snap, Weight w, NodeId src, TreeCache* cache,
                                           std::optional<ShortestPathTree>& local) {
  if (cache != nullptr) {
    auto it = cache->find({src, w});
    if (it == cache->end()) it = cache->emplace(std::pair{src, w}, ShortestPathTree(snap, w, src)).first;
    return it->second;
  }
  local.emplace(snap, w, src);
  return *local;
}

// MPLF: one trace per source-associated satellite toward the header's sAddr.
// SP/LH: one path per (source-associated, destination-associated) pair.
inline PathSet enumerate_paths(const Snapshot& snap, Algorithm algorithm, std::size_t src_station,
                               std::size_t dst_station, const MplfHeader* header, std::size_t max_hops,
                               TreeCache* cache = nullptr) {
  PathSet set;
  const auto src_sats = snap.associated_satellites(src_station);
  const auto dst_sats = snap.associated_satellites(dst_station);
  set.src_associated = src_sats.size();
  set.dst_associated = dst_sats.size();
  const NodeId g_s = snap.station_node(src_station);
  const NodeId g_d = snap.station_node(dst_station);

  if (is_mplf(algorithm)) {
    if (header == nullptr) throw std::invalid_argument("MPLF enumeration needs an ingress header");
    for (NodeId s : src_sats) {
      Path p = trace_path(snap, strategy_of(algorithm), s, *header, max_hops);
      p.uplink_km = snap.find_link(g_s, s)->length_km;
      (p.delivered() ? set.paths : set.dropped).push_back(std::move(p));
    }
    return set;
  }

  const Weight w = algorithm == Algorithm::sp ? Weight::latency : Weight::unit;
  for (NodeId a : src_sats) {
    std::optional<ShortestPathTree> local;
    const ShortestPathTree& tree = cached_tree(snap, w, a, cache, local);
    for (NodeId b : dst_sats) {
      auto gp = tree.path_to(b);
      if (!gp) continue;
      Path p = to_path(snap, *gp);
      p.uplink_km = snap.find_link(g_s, a)->length_km;
      p.downlink_km = snap.find_link(b, g_d)->length_km;
      set.paths.push_back(std::move(p));
    }
  }
  return set;
}

}  // namespace leonet
