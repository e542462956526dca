#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace drwps {

using NodeId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double euclidean(Vec2 a, Vec2 b);

// Undirected graph, immutable after construction. Adjacency is CSR with each
// neighbor list sorted by id; symmetric, no self-loops, no parallel edges.
//
// Positions are generation metadata: unit-disk construction records them and
// Euclidean metrics read them, but nothing in the walk or brokerage layers
// ever does. Edge-list graphs have no positions unless a companion position
// document is supplied.
class Topology {
 public:
  // n points uniform on [0,1]^2; an edge joins every pair at Euclidean
  // distance <= radius. Deterministic in (n, radius, seed).
  static Topology unit_disk(std::uint32_t n, double radius, std::uint64_t seed);

  // Same edge rule over caller-supplied positions.
  static Topology unit_disk_from_positions(std::vector<Vec2> positions, double radius);

  // Edge-list document: one "a b" pair per line, '#' starts a comment, blank
  // lines ignored. Pairs may repeat in either orientation; the result is the
  // symmetric closure. Self-loops and malformed lines raise ParseError with
  // the 1-based line number. Node count is max id + 1 unless the optional
  // position document names further (isolated) nodes.
  static Topology from_edge_list(std::string_view text,
                                 std::optional<std::string_view> positions_text = std::nullopt);

  std::uint32_t size() const { return n_; }
  std::size_t edge_count() const { return adjacency_.size() / 2; }

  // Sorted neighbor ids of a.
  std::span<const NodeId> neighbors(NodeId a) const;
  std::uint32_t degree(NodeId a) const;
  bool adjacent(NodeId a, NodeId b) const;

  bool has_positions() const { return !positions_.empty(); }
  Vec2 position(NodeId a) const;
  std::optional<double> radius() const { return radius_; }

  // Text forms readable by from_edge_list; edges emitted once as "a b" with
  // a < b, sorted.
  std::string to_edge_list() const;
  std::string to_position_list() const;

 private:
  Topology() = default;
  void build_csr(std::uint32_t n, std::vector<std::pair<NodeId, NodeId>>& edges);
  void check_node(NodeId a) const;

  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<Vec2> positions_;
  std::optional<double> radius_;
};

// Union of the neighbor sets of the nodes in s, sorted and duplicate-free.
// Members of s appear in the result exactly when some other member is
// adjacent to them; they are not removed. Two applications give the second
// neighborhood.
std::vector<NodeId> neighborhood_of_set(const Topology& t, std::span<const NodeId> s);

// Sorted node set of the maximal connected subgraph containing a
// (breadth-first traversal).
std::vector<NodeId> connected_component(const Topology& t, NodeId a);

}  // namespace drwps
