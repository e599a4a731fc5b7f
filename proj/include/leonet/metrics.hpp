#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "leonet/geometry.hpp"
#include "leonet/routing.hpp"

namespace leonet {

struct ReachabilityRecord {
  std::size_t pair{0};   // connection index
  std::size_t stamp{0};  // time-grid index
  bool reachable{false};
};

// Mean of psi over every (pair, stamp) combination.
inline double reachable_probability(std::span<const ReachabilityRecord> records) {
  if (records.empty()) throw std::invalid_argument("reachable_probability: no records");
  std::set<std::pair<std::size_t, std::size_t>> cells;
  std::set<std::size_t> pairs, stamps;
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (!cells.emplace(r.pair, r.stamp).second) {
      throw std::invalid_argument("reachable_probability: duplicate (pair, stamp) record");
    }
    pairs.insert(r.pair);
    stamps.insert(r.stamp);
    hits += r.reachable ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size() * stamps.size());
}

// gamma = n_v / n_e over the union of the paths' satellites and ISLs.
inline double path_independence(std::span<const Path> paths) {
  if (paths.empty()) throw std::invalid_argument("path_independence: empty path set");
  std::set<NodeId> vertices;
  std::set<NodePair> edges;
  for (const Path& p : paths) {
    vertices.insert(p.satellites.begin(), p.satellites.end());
    for (std::size_t i = 1; i < p.satellites.size(); ++i)
      edges.insert(NodePair::canonical(p.satellites[i - 1], p.satellites[i]));
  }
  if (edges.empty()) throw std::invalid_argument("path_independence: union has no ISL edges");
  return static_cast<double>(vertices.size()) / static_cast<double>(edges.size());
}

inline std::set<NodeId> satellite_vertices(std::span<const Path> paths) {
  std::set<NodeId> out;
  for (const Path& p : paths) out.insert(p.satellites.begin(), p.satellites.end());
  return out;
}

// |V(P^t) xor V(P^t+1)| on satellite vertices.
inline std::size_t path_evolution(std::span<const Path> before, std::span<const Path> after) {
  const auto a = satellite_vertices(before);
  const auto b = satellite_vertices(after);
  std::vector<NodeId> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  return diff.size();
}

inline double stretch(double path_length_km, double geodesic_km) {
  if (!(geodesic_km > 0.0)) throw std::invalid_argument("stretch: zero geodesic distance");
  return path_length_km / geodesic_km;
}

inline double stretch(const Path& path, const GeodeticPoint& src, const GeodeticPoint& dst) {
  return stretch(path.total_length_km(), geodesic_distance(src, dst));
}

struct SeriesStats {
  double min{0.0};
  double avg{0.0};
  double max{0.0};
  std::size_t count{0};
};

inline SeriesStats summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: all stamps invalid");
  SeriesStats s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : values) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    sum += v;
  }
  s.count = values.size();
  s.avg = sum / static_cast<double>(values.size());
  // Rounding can push the mean of a constant series a hair outside [min, max].
  s.avg = std::clamp(s.avg, s.min, s.max);
  return s;
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct CdfPoint {
  double value{0.0};
  double fraction{0.0};  // P(X <= value)
};

// Empirical CDF, one point per distinct value.
inline std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

// Fraction of samples <= x.
inline double fraction_at_most(std::span<const double> values, double x) {
  if (values.empty()) return 0.0;
  const auto n = std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; });
  return static_cast<double>(n) / static_cast<double>(values.size());
}

// True when the CDF of `left` is >= the CDF of `right` at every sample point,
// i.e. `left` is first-order stochastically smaller.
inline bool cdf_dominates(std::vector<double> left, std::vector<double> right) {
  if (left.empty() || right.empty()) return false;
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  auto cdf = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) /
           static_cast<double>(v.size());
  };
  for (const auto* sample : {&left, &right})
    for (double x : *sample)
      if (cdf(left, x) < cdf(right, x)) return false;
  return true;
}

}  // namespace leonet
