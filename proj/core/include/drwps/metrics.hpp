#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drwps/topology.hpp"
#include "drwps/walks.hpp"

namespace drwps {

// One message-handling event at a node. Load counts one unit each for being
// stepped through by a walk, storing a subscription filter, and evaluating a
// match; nothing else contributes.
enum class LoadKind : std::uint8_t { WalkStep, FilterStore, MatchEval };

struct LoadEvent {
  NodeId node = 0;
  LoadKind kind = LoadKind::WalkStep;
};

struct LoadProfile {
  std::vector<std::uint64_t> per_node_load;  // dense, indexed by NodeId
  std::uint32_t nodes_used = 0;
  std::uint64_t max_load = 0;
  std::uint64_t total_events = 0;
  double gini = 0.0;  // over used nodes only
};

// Aggregates events into per-node counts plus the summary stats above.
LoadProfile load_profile(std::span<const LoadEvent> events, std::uint32_t node_count);

// Gini coefficient by the sorted-cumulative formula,
//   G = 2 * sum(i * x_i) / (u * sum(x)) - (u + 1) / u
// with x ascending and i counted from 1. Zero for uniform or empty input.
double gini_coefficient(std::span<const std::uint64_t> loads);

// Straight-line distance between the positions of the first and last node of
// path; empty result when the topology has no positions. Throws
// ParameterError on an empty path.
std::optional<double> euclidean_displacement(const Topology& t, std::span<const NodeId> path);

// A visited node together with the walk-step ordinal at which its walk
// reached it.
struct StampedNode {
  NodeId node = 0;
  std::uint32_t stamp = 0;
};

// Smallest round r such that some node occurs in both walks with both stamps
// <= r; empty when the node sets are disjoint. Symmetric.
std::optional<std::uint32_t> intersection_step(std::span<const StampedNode> a,
                                               std::span<const StampedNode> b);

// The walk's visited nodes with their step stamps, ready for
// intersection_step.
std::vector<StampedNode> stamped_members(const WalkState& w);

// One experiment outcome row. Field order mirrors the CSV columns; optional
// fields serialize as empty. variant_index is the position of the walk
// variant in the config, used for deterministic ordering, and is not a CSV
// column of its own (kind/branches echo the variant).
struct MetricsRecord {
  std::uint64_t seed = 0;
  std::uint32_t n = 0;
  std::optional<double> radius;
  WalkKind kind = WalkKind::PureRandom;
  std::uint32_t branches = 1;
  double alpha = 0.0;
  double beta = 0.0;
  double penalty = 0.0;
  std::uint32_t ttl = 0;
  std::optional<bool> cooperative;
  std::optional<std::uint32_t> intersection_step;
  std::optional<std::uint32_t> hops_to_match;
  std::optional<bool> delivered;
  std::optional<std::uint32_t> path_hops_a;
  std::optional<std::uint32_t> path_hops_b;
  std::optional<double> euclid_a;
  std::optional<double> euclid_b;
  std::uint32_t nodes_used = 0;
  std::uint64_t max_load = 0;
  double gini = 0.0;
  std::optional<std::uint32_t> broker_count;

  std::uint32_t variant_index = 0;
};

}  // namespace drwps
