#include "drwps/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "drwps/errors.hpp"
#include "drwps/rng.hpp"

using namespace drwps;

namespace {

// Quadratic reference: all pairs within radius, as sorted (a, b) with a < b.
std::vector<std::pair<NodeId, NodeId>> brute_force_edges(const std::vector<Vec2>& pts,
                                                         double radius) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId a = 0; a < pts.size(); ++a) {
    for (NodeId b = a + 1; b < pts.size(); ++b) {
      if (euclidean(pts[a], pts[b]) <= radius) edges.emplace_back(a, b);
    }
  }
  return edges;
}

std::vector<Vec2> positions_of(const Topology& t) {
  std::vector<Vec2> pts(t.size());
  for (NodeId v = 0; v < t.size(); ++v) pts[v] = t.position(v);
  return pts;
}

// Minimal union-find, the independent oracle for connected_component.
struct UnionFind {
  std::vector<NodeId> parent;
  explicit UnionFind(NodeId n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  NodeId find(NodeId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(NodeId a, NodeId b) { parent[find(a)] = find(b); }
};

}  // namespace

TEST_CASE("single node, no edges") {
  const Topology t = Topology::unit_disk(1, 0.5, 12345);
  CHECK(t.size() == 1);
  CHECK(t.edge_count() == 0);
  CHECK(t.neighbors(0).empty());
  CHECK(t.degree(0) == 0);
  CHECK(t.radius() == 0.5);
}

TEST_CASE("forced positions connect exactly within the radius") {
  const Topology t = Topology::unit_disk_from_positions({{0.0, 0.0}, {0.0, 0.3}}, 0.5);
  CHECK(t.size() == 2);
  CHECK(t.edge_count() == 1);
  CHECK(t.adjacent(0, 1));

  const Topology far = Topology::unit_disk_from_positions({{0.0, 0.0}, {0.0, 0.6}}, 0.5);
  CHECK(far.edge_count() == 0);
}

TEST_CASE("generated graph matches the quadratic distance oracle") {
  const Topology t = Topology::unit_disk(100, 0.15, 42);
  const auto pts = positions_of(t);
  const auto expected = brute_force_edges(pts, 0.15);
  CHECK(t.edge_count() == expected.size());
  for (const auto& [a, b] : expected) {
    CHECK(t.adjacent(a, b));
    CHECK(t.adjacent(b, a));
  }
  // Per-node neighbor lists equal the brute-force distance filter.
  for (NodeId a = 0; a < t.size(); ++a) {
    std::vector<NodeId> want;
    for (NodeId b = 0; b < t.size(); ++b) {
      if (b != a && euclidean(pts[a], pts[b]) <= 0.15) want.push_back(b);
    }
    const auto got = t.neighbors(a);
    REQUIRE(got.size() == want.size());
    CHECK(std::equal(got.begin(), got.end(), want.begin()));
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const Topology a = Topology::unit_disk(60, 0.2, 7);
  const Topology b = Topology::unit_disk(60, 0.2, 7);
  const Topology c = Topology::unit_disk(60, 0.2, 8);
  CHECK(a.to_edge_list() == b.to_edge_list());
  CHECK(a.to_position_list() == b.to_position_list());
  CHECK(a.to_position_list() != c.to_position_list());
}

TEST_CASE("adjacency is symmetric and loop-free") {
  const Topology t = Topology::unit_disk(80, 0.25, 3);
  for (NodeId a = 0; a < t.size(); ++a) {
    for (NodeId b : t.neighbors(a)) {
      CHECK(b != a);
      CHECK(t.adjacent(b, a));
    }
  }
}

TEST_CASE("generation parameter errors") {
  CHECK_THROWS_AS(Topology::unit_disk(0, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(Topology::unit_disk(5, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(Topology::unit_disk(5, -0.1, 1), ParameterError);
  CHECK_THROWS_AS(Topology::unit_disk(5, std::sqrt(2.0) + 0.01, 1), ParameterError);
  CHECK_NOTHROW(Topology::unit_disk(5, std::sqrt(2.0), 1));
  CHECK_THROWS_AS(Topology::unit_disk_from_positions({{1.5, 0.0}}, 0.5), ParameterError);
}

TEST_CASE("radius sqrt(2) yields the complete graph") {
  const Topology t = Topology::unit_disk(12, std::sqrt(2.0), 99);
  CHECK(t.edge_count() == 12u * 11u / 2u);
}

TEST_CASE("edge list parses paths and collapses duplicates") {
  const Topology path = Topology::from_edge_list("0 1\n1 2");
  CHECK(path.size() == 3);
  CHECK(path.edge_count() == 2);
  CHECK(path.adjacent(0, 1));
  CHECK(path.adjacent(1, 2));
  CHECK(!path.adjacent(0, 2));
  CHECK(!path.has_positions());
  CHECK(!path.radius().has_value());

  const Topology dup = Topology::from_edge_list("0 1\n1 0");
  CHECK(dup.size() == 2);
  CHECK(dup.edge_count() == 1);
}

TEST_CASE("edge list rejects malformed input with line numbers") {
  CHECK_THROWS_WITH_AS(Topology::from_edge_list("0 0"), doctest::Contains("line 1"),
                       ParseError);
  CHECK_THROWS_WITH_AS(Topology::from_edge_list("0 1\n2"), doctest::Contains("line 2"),
                       ParseError);
  CHECK_THROWS_WITH_AS(Topology::from_edge_list("0 1\n\n1 2 3"), doctest::Contains("line 3"),
                       ParseError);
  CHECK_THROWS_AS(Topology::from_edge_list("a b"), ParseError);
  CHECK_THROWS_AS(Topology::from_edge_list("0 -1"), ParseError);
  CHECK_THROWS_AS(Topology::from_edge_list("0 4294967295"), ParseError);  // reserved top id
}

TEST_CASE("edge list ignores comments and blank lines") {
  const Topology t = Topology::from_edge_list("# header\n\n0 1  # inline\n  \n1 2\n");
  CHECK(t.size() == 3);
  CHECK(t.edge_count() == 2);
}

TEST_CASE("edge list round-trips through its text form") {
  const Topology t = Topology::unit_disk(40, 0.3, 11);
  const Topology back = Topology::from_edge_list(t.to_edge_list());
  CHECK(back.size() == t.size());
  CHECK(back.to_edge_list() == t.to_edge_list());
}

TEST_CASE("position companion restores coordinates and may add isolated nodes") {
  const Topology t = Topology::unit_disk(25, 0.3, 5);
  const Topology back = Topology::from_edge_list(t.to_edge_list(), t.to_position_list());
  REQUIRE(back.has_positions());
  REQUIRE(back.size() == t.size());
  for (NodeId v = 0; v < t.size(); ++v) {
    CHECK(back.position(v).x == t.position(v).x);
    CHECK(back.position(v).y == t.position(v).y);
  }

  // A position row can name a node the edge list never mentions.
  const Topology grown = Topology::from_edge_list("0 1", "0 0 0\n1 0.1 0\n2 0.9 0.9\n");
  CHECK(grown.size() == 3);
  CHECK(grown.degree(2) == 0);

  CHECK_THROWS_AS(Topology::from_edge_list("0 1\n1 2", "0 0 0\n1 0.1 0\n"), ParseError);
  CHECK_THROWS_AS(Topology::from_edge_list("0 1", "0 0 0\n1 0.1 2.0\n"), ParseError);
  CHECK_THROWS_AS(Topology::from_edge_list("0 1", "0 0 0\n0 0.1 0\n1 0 0.5\n"), ParseError);
}

TEST_CASE("neighbors of small shapes") {
  const Topology tri = Topology::from_edge_list("0 1\n1 2\n2 0");
  const auto n0 = tri.neighbors(0);
  REQUIRE(n0.size() == 2);
  CHECK(n0[0] == 1);
  CHECK(n0[1] == 2);

  const Topology iso = Topology::from_edge_list("0 1", "0 0 0\n1 0.1 0\n2 0.5 0.5\n");
  CHECK(iso.neighbors(2).empty());

  CHECK_THROWS_AS(tri.neighbors(3), ParameterError);
  CHECK_THROWS_AS(tri.degree(99), ParameterError);
}

TEST_CASE("neighborhood_of_set is the raw union, members retained") {
  // Path 0-1-2-3: N({0,1}) = N(0) ∪ N(1) = {1} ∪ {0,2} = {0,1,2}.
  const Topology path = Topology::from_edge_list("0 1\n1 2\n2 3");
  const std::vector<NodeId> s{0, 1};
  const auto hood = neighborhood_of_set(path, s);
  CHECK(hood == std::vector<NodeId>{0, 1, 2});

  CHECK(neighborhood_of_set(path, {}).empty());

  // Second application gives the second neighborhood: N({0,1,2}) = {0,1,2,3}.
  const auto hood2 = neighborhood_of_set(path, hood);
  CHECK(hood2 == std::vector<NodeId>{0, 1, 2, 3});
}

TEST_CASE("neighborhood_of_set matches the per-element union oracle") {
  const Topology t = Topology::unit_disk(120, 0.18, 21);
  RngStream rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<NodeId> pick;
    while (pick.size() < 5) {
      pick.insert(static_cast<NodeId>(rng.uniform_index(t.size())));
    }
    const std::vector<NodeId> s(pick.begin(), pick.end());
    std::set<NodeId> want;
    for (NodeId v : s) {
      const auto nbrs = t.neighbors(v);
      want.insert(nbrs.begin(), nbrs.end());
    }
    const auto got = neighborhood_of_set(t, s);
    CHECK(got == std::vector<NodeId>(want.begin(), want.end()));
  }
}

TEST_CASE("connected_component on small shapes") {
  const Topology tri = Topology::from_edge_list("0 1\n1 2\n2 0");
  CHECK(connected_component(tri, 1) == std::vector<NodeId>{0, 1, 2});

  const Topology pairs = Topology::from_edge_list("0 1\n2 3");
  CHECK(connected_component(pairs, 0) == std::vector<NodeId>{0, 1});
  CHECK(connected_component(pairs, 3) == std::vector<NodeId>{2, 3});

  CHECK_THROWS_AS(connected_component(tri, 5), ParameterError);
}

TEST_CASE("connected_component matches a union-find oracle") {
  const Topology t = Topology::unit_disk(200, 0.12, 7);
  UnionFind uf(t.size());
  for (NodeId a = 0; a < t.size(); ++a) {
    for (NodeId b : t.neighbors(a)) uf.unite(a, b);
  }
  for (NodeId probe : {NodeId{0}, NodeId{50}, NodeId{123}, NodeId{199}}) {
    std::vector<NodeId> want;
    const NodeId root = uf.find(probe);
    for (NodeId v = 0; v < t.size(); ++v) {
      if (uf.find(v) == root) want.push_back(v);
    }
    CHECK(connected_component(t, probe) == want);
  }
}

TEST_CASE("position access requires positions") {
  const Topology t = Topology::from_edge_list("0 1");
  CHECK_THROWS_AS(t.position(0), StateError);
  CHECK_THROWS_AS(t.to_position_list(), StateError);
}
