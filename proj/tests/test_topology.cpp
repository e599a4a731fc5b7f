#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "support.hpp"

using namespace leonet;
using namespace leonet::testing;

namespace {

std::map<NodeId, int> degree_census(const std::vector<PersistentIsl>& isls) {
  std::map<NodeId, int> deg;
  for (const auto& l : isls) {
    ++deg[l.pair.a];
    ++deg[l.pair.b];
  }
  return deg;
}

}  // namespace

TEST(IslPattern, Validation) {
  EXPECT_NO_THROW(plus_grid().validate());
  EXPECT_NO_THROW((IslPattern{GridKind::plus, {-1}}.validate()));
  EXPECT_NO_THROW(star_grid().validate());
  EXPECT_THROW((IslPattern{GridKind::plus, {0, -1}}.validate()), std::invalid_argument);
  EXPECT_THROW((IslPattern{GridKind::star, {0}}.validate()), std::invalid_argument);
  EXPECT_THROW((IslPattern{GridKind::plus, {1}}.validate()), std::invalid_argument);
  EXPECT_THROW((IslPattern{GridKind::star, {0, 0}}.validate()), std::invalid_argument);
}

TEST(PersistentIsls, PlusGridDegreeCensus) {
  const Constellation c(shell(20, 20));
  const auto isls = build_persistent_isls(c, plus_grid());
  EXPECT_EQ(isls.size(), 800u);
  const auto deg = degree_census(isls);
  EXPECT_EQ(deg.size(), 400u);
  for (const auto& [v, d] : deg) EXPECT_EQ(d, 4) << v;
}

TEST(PersistentIsls, StarGridDegreeCensus) {
  const Constellation c(shell(40, 40));
  const auto isls = build_persistent_isls(c, star_grid());
  EXPECT_EQ(isls.size(), 4800u);
  for (const auto& [v, d] : degree_census(isls)) ASSERT_EQ(d, 6) << v;
}

TEST(PersistentIsls, NeighbourRule) {
  const Constellation c(shell(6, 5));
  const auto isls = build_persistent_isls(c, star_grid());
  std::set<NodePair> pairs;
  for (const auto& l : isls) pairs.insert(l.pair);
  auto has = [&](SatelliteId x, SatelliteId y) { return pairs.contains(NodePair::canonical(c.flat(x), c.flat(y))); };
  EXPECT_TRUE(has({2, 3}, {2, 4}));
  EXPECT_TRUE(has({2, 5}, {2, 0}));
  EXPECT_TRUE(has({2, 3}, {3, 3}));
  EXPECT_TRUE(has({2, 3}, {3, 2}));
  EXPECT_TRUE(has({4, 0}, {0, 5}));
  EXPECT_FALSE(has({2, 3}, {3, 4}));
}

TEST(PersistentIsls, SinglePlaneSlotRejected) {
  EXPECT_THROW(build_persistent_isls(Constellation(shell(1, 10)), plus_grid()), std::invalid_argument);
}

TEST(Link, SelfLinkAndLatency) {
  EXPECT_THROW(make_link(3, 3, LinkKind::iisl, 10.0), std::invalid_argument);
  EXPECT_THROW(make_link(3, 4, LinkKind::iisl, 0.0), std::invalid_argument);
  const Link l = make_link(9, 2, LinkKind::sisl, 299.792458);
  EXPECT_EQ(l.a, 2u);
  EXPECT_EQ(l.b, 9u);
  EXPECT_DOUBLE_EQ(l.latency_ms, 1.0);
}

TEST(EdgeLinks, VisibilityCensusAtEquator) {
  const Constellation c(shell(40, 40));
  const std::vector<Station> st{ground("Null", 0, 0)};
  const UtcTime t = add_seconds(kEpoch, 600.0);
  const Snapshot snap = make_snapshot(c, st, plus_grid(), t);
  const Vec3 g = snap.positions[snap.station_node(0)];
  std::size_t visible = 0;
  for (NodeId s = 0; s < snap.satellite_count; ++s) {
    const Vec3 u = normalized(g);
    const Vec3 los = snap.positions[s] - g;
    if (rad_to_deg(std::asin(dot(u, los) / norm(los))) >= 40.0) ++visible;
  }
  EXPECT_GT(visible, 0u);
  EXPECT_EQ(snap.associated_satellites(0).size(), visible);
}

TEST(EdgeLinks, NearZenithMask) {
  const Constellation c(shell(40, 40));
  const std::vector<Station> st{ground("A", 10, 10)};
  SnapshotOptions o;
  o.min_elevation_deg = 90.0 - 1e-9;
  const Snapshot snap = make_snapshot(c, st, plus_grid(), kEpoch, o);
  EXPECT_LE(snap.associated_satellites(0).size(), 1u);
  o.min_elevation_deg = 90.0;
  EXPECT_THROW(make_snapshot(c, st, plus_grid(), kEpoch, o), std::invalid_argument);
}

TEST(EdgeLinks, UncoveredStation) {
  const Constellation c(shell(4, 4));
  const std::vector<Station> st{ground("Pole", 90, 0)};
  const Snapshot snap = make_snapshot(c, st, plus_grid(), kEpoch);
  EXPECT_TRUE(snap.associated_satellites(0).empty());
  EXPECT_FALSE(snap.covered(0));
  EXPECT_TRUE(snap.neighbors(snap.station_node(0)).empty());
}

TEST(Snapshot, Invariants) {
  const Constellation c(shell(20, 20));
  const std::vector<Station> st{ground("Harbin", 45.8038, 126.534), ground("London", 51.5074, -0.1278)};
  const auto tmpl = build_persistent_isls(c, plus_grid());
  const Snapshot a = make_snapshot(c, st, tmpl, kEpoch);
  const Snapshot b = make_snapshot(c, st, tmpl, add_seconds(kEpoch, 10.0));
  EXPECT_EQ(a.node_count(), 402u);

  auto isl_pairs = [](const Snapshot& s) {
    std::set<NodePair> out;
    for (const auto& l : s.links)
      if (is_isl(l.kind)) out.insert({l.a, l.b});
    return out;
  };
  EXPECT_EQ(isl_pairs(a), isl_pairs(b));

  for (const Snapshot* s : {&a, &b}) {
    for (std::uint32_t i = 0; i < s->links.size(); ++i) {
      const Link& l = s->links[i];
      ASSERT_LT(l.a, s->node_count());
      ASSERT_LT(l.b, s->node_count());
      ASSERT_NE(s->find_link(l.a, l.b), nullptr);
      ASSERT_NE(s->find_link(l.b, l.a), nullptr);
      ASSERT_NEAR(l.length_km, distance(s->positions[l.a], s->positions[l.b]), 1e-9);
    }
    for (NodeId v = 0; v < s->node_count(); ++v) {
      const auto adj = s->neighbors(v);
      for (std::size_t k = 1; k < adj.size(); ++k) ASSERT_LT(adj[k - 1].node, adj[k].node);
    }
  }
}

TEST(Snapshot, IntraPlaneLinksEqualLength) {
  const Constellation c(shell(20, 20, 3));
  const Snapshot s = make_snapshot(c, {}, plus_grid(), add_seconds(kEpoch, 777.0));
  std::map<int, std::vector<double>> by_plane;
  for (const auto& l : s.links)
    if (l.kind == LinkKind::iisl) by_plane[static_cast<int>(l.a) / 20].push_back(l.length_km);
  for (const auto& [p, lens] : by_plane) {
    ASSERT_EQ(lens.size(), 20u);
    for (double v : lens) ASSERT_NEAR(v, lens.front(), 1e-6);
  }
}

TEST(Snapshot, NodeNames) {
  const Constellation c(shell(5, 4));
  const std::vector<Station> st{ground("X", 0, 0)};
  const Snapshot s = make_snapshot(c, st, plus_grid(), kEpoch);
  EXPECT_EQ(s.node_name(7), "S1_2");
  EXPECT_EQ(s.node_name(20), "X");
  EXPECT_EQ(s.station_index_by_ei("EI-X"), 0u);
  EXPECT_FALSE(s.station_index_by_name("Y"));
}

TEST(Stations, DuplicateEquipmentIdRejected) {
  std::vector<Station> st{ground("A", 0, 0), ground("B", 1, 1)};
  st[1].ei = st[0].ei;
  EXPECT_THROW(validate_stations(st), std::invalid_argument);
}

TEST(Eisl, ExcludesPersistentPairsAndNeedsCrossingMeshes) {
  const Constellation c(shell(20, 20));
  const Snapshot s = make_snapshot(c, {}, plus_grid(), add_seconds(kEpoch, 300.0));
  const auto e = detect_eisls(s, 1500.0);
  EXPECT_FALSE(e.empty());
  for (const auto& p : e) {
    EXPECT_EQ(s.find_link(p.a, p.b), nullptr);
    EXPECT_NE(s.velocities[p.a].z > 0, s.velocities[p.b].z > 0);
    EXPECT_LT(distance(s.positions[p.a], s.positions[p.b]), 1500.0);
  }
  EXPECT_TRUE(detect_eisls(s, 1e-6).empty());
  EXPECT_THROW(detect_eisls(s, 0.0), std::invalid_argument);
}

TEST(Eisl, EpisodeTracking) {
  EislEpisodeTracker tr;
  const std::vector<NodePair> ab{{1, 2}}, none{}, both{{1, 2}, {3, 4}};
  tr.observe(0, ab);
  tr.observe(1, both);
  tr.observe(2, none);
  tr.observe(3, ab);
  const auto eps = tr.finish();
  ASSERT_EQ(eps.size(), 3u);
  EXPECT_EQ(eps[0].stamps, 2u);
  EXPECT_EQ(eps[1].pair, (NodePair{3, 4}));
  EXPECT_EQ(eps[1].stamps, 1u);
  EXPECT_EQ(eps[2].first_stamp, 3u);
  EXPECT_EQ(tr.counts_per_stamp(), (std::vector<std::size_t>{1, 2, 0, 1}));
}

TEST(DirectionHistogram, NormalisedAndSingleSnapshotExact) {
  const Constellation c(shell(20, 20));
  const std::vector<Snapshot> one{make_snapshot(c, {}, plus_grid(), kEpoch)};
  const auto h = direction_histogram(one);
  EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), 1.0, 1e-12);

  DirectionHistogram manual{};
  std::size_t n = 0;
  for (const auto& l : one[0].links) {
    manual[direction_bin(link_equator_angle(one[0].positions[l.b] - one[0].positions[l.a]))] += 1;
    ++n;
  }
  for (std::size_t i = 0; i < kDirectionBins; ++i) EXPECT_DOUBLE_EQ(h[i], manual[i] / n);
}

TEST(DirectionHistogram, HorizontalRingAndInclinedPlanes) {
  const Constellation c(shell(40, 40));
  std::vector<Snapshot> snaps;
  for (int k = 0; k < 10; ++k) snaps.push_back(make_snapshot(c, {}, plus_grid(), add_seconds(kEpoch, 60.0 * k)));
  const std::vector<LinkKind> sisl{LinkKind::sisl}, iisl{LinkKind::iisl};
  const auto hs = direction_histogram(snaps, sisl);
  const auto hi = direction_histogram(snaps, iisl);
  double s_low = 0, i_near = 0;
  for (std::size_t b = 0; b < 3; ++b) s_low += hs[b];
  for (std::size_t b = 50; b < 56; ++b) i_near += hi[b];
  EXPECT_GT(s_low, 0.99);
  // sin|alpha| = sin(i)|cos u| with u uniform: P(|alpha| >= 50 deg) = (2/pi) acos(sin 50 / sin 53).
  const double analytic = 2.0 / kPi * std::acos(std::sin(deg_to_rad(50.0)) / std::sin(deg_to_rad(53.0)));
  EXPECT_NEAR(i_near, analytic, 0.02);
  const auto mode = static_cast<std::size_t>(std::max_element(hi.begin(), hi.end()) - hi.begin());
  EXPECT_GE(mode, 50u);
  EXPECT_LT(mode, 56u);
  double i_above = 0;
  for (std::size_t b = 54; b < kDirectionBins; ++b) i_above += hi[b];
  EXPECT_EQ(i_above, 0.0);
}

TEST(DirectionHistogram, Errors) {
  EXPECT_THROW(direction_histogram({}), std::invalid_argument);
  const Constellation c(shell(4, 4));
  const std::vector<Snapshot> one{make_snapshot(c, {}, plus_grid(), kEpoch)};
  const std::vector<LinkKind> eisl{LinkKind::eisl};
  EXPECT_THROW(direction_histogram(one, eisl), std::invalid_argument);
  EXPECT_EQ(direction_bin(deg_to_rad(-89.9)), 89u);
  EXPECT_EQ(direction_bin(deg_to_rad(90.0)), 89u);
  EXPECT_EQ(direction_bin(deg_to_rad(0.5)), 0u);
}
