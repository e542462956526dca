#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "drwps/rng.hpp"
#include "drwps/topology.hpp"

namespace drwps {

// The three walk constructions. PureRandom picks uniformly; the two
// directional kinds score candidates and move to the cheapest, which steers
// the path away from its own recent past:
//   DrwWeighted scores a candidate z by how many neighbors it shares with
//   the penultimate node, plus any penalty the walk has laid down on z.
//   DrwMarking scores a candidate v by its neighbor overlap with the walk's
//   first and second neighborhoods, weighted alpha/beta, and marks both
//   neighborhoods of every node it adds.
enum class WalkKind { PureRandom, DrwWeighted, DrwMarking };

enum class TieRule { SmallestId, Random };

enum class BranchStatus { Active, Stuck, Exhausted };

// Names used in config files and CSV output.
std::string_view to_string(WalkKind kind);
std::string_view to_string(TieRule rule);
std::optional<WalkKind> walk_kind_from_string(std::string_view name);
std::optional<TieRule> tie_rule_from_string(std::string_view name);

struct WalkConfig {
  WalkKind kind = WalkKind::DrwMarking;
  std::uint32_t branches = 2;      // 1 or 2
  double alpha = 1.0;              // DrwMarking first-neighborhood weight
  double beta = 1.0;               // DrwMarking second-neighborhood weight
  double penalty = 1.0;            // DrwWeighted per-added-node increment
  std::uint32_t max_steps = 0;     // TTL per branch, must be >= 1
  TieRule tie = TieRule::SmallestId;
  bool pure_unrestricted = false;  // PureRandom only: classical memoryless walk
  bool maximize_score = false;     // sensitivity runs: flip the score comparator

  // Throws ParameterError on violation.
  void validate() const;

  friend bool operator==(const WalkConfig&, const WalkConfig&) = default;
};

// Default TTL for a graph of node_count nodes: 10 * sqrt(n), rounded.
std::uint32_t default_max_steps(std::uint32_t node_count);

// Evolving state of one walk (one or two branches growing from a shared
// origin). A value type: copy it to snapshot, step it with the free
// functions below. The flag vectors are sized to the topology the walk was
// started on; stepping it on a different topology is an error.
struct WalkState {
  WalkConfig config;
  NodeId origin = 0;

  // Per-branch node sequences, each starting at origin.
  std::vector<std::vector<NodeId>> branch_paths;
  std::vector<BranchStatus> status;
  std::vector<std::uint32_t> steps_taken;

  // Every distinct visited node in insertion order, with the walk-step
  // ordinal at which it joined (origin at 0). Self-avoiding kinds never
  // revisit, so for them this is the disjoint union of the branch paths.
  std::vector<NodeId> members;
  std::vector<std::uint32_t> member_stamps;

  // Total branch-steps taken across the walk; stamps are drawn from it.
  std::uint32_t total_steps = 0;

  std::vector<std::uint8_t> member_flag;     // node -> is in members
  std::vector<std::uint8_t> in_first_hood;   // DrwMarking: neighborhood of members
  std::vector<std::uint8_t> in_second_hood;  // DrwMarking: neighborhood of the above
  std::vector<double> penalties;             // DrwWeighted: accumulated per node

  // Round-robin cursor for step_next.
  std::uint32_t next_branch = 0;

  bool is_member(NodeId v) const { return member_flag[v] != 0; }
  bool is_marked(NodeId v) const {
    return in_first_hood[v] != 0 || in_second_hood[v] != 0;
  }
  NodeId tip(std::uint32_t branch) const { return branch_paths[branch].back(); }
  bool any_active() const;
};

// Initial state: origin placed on every branch, zero steps. Branches start
// Stuck when the origin is isolated. DrwMarking marks the origin's first and
// second neighborhoods immediately.
WalkState start_walk(const Topology& t, NodeId origin, const WalkConfig& cfg);

// Number of common neighbors of x and z.
std::uint32_t weight_two_hop(const Topology& t, NodeId x, NodeId z);

// alpha * |N(v) ∩ N(M)| + beta * |N(v) ∩ N²(M)| for walk set M, computed
// from scratch with neighborhood_of_set. step_branch keeps the same
// quantities incrementally; this form is the reference the tests replay.
double cost_marking(const Topology& t, NodeId v, std::span<const NodeId> drw_members,
                    double alpha, double beta);

// Advances one branch by one step. Candidates are the tip's neighbors minus
// visited nodes (all of them for an unrestricted pure walk); DrwMarking
// prefers unmarked candidates and falls back to scoring marked ones when
// none remain. Returns the appended node, or nullopt when the branch found
// no candidate and went Stuck. Reaching max_steps flips the branch to
// Exhausted. Stepping a non-Active branch throws StateError.
std::optional<NodeId> step_branch(const Topology& t, WalkState& w, std::uint32_t branch,
                                  RngStream& rng);

struct StepResult {
  std::uint32_t branch = 0;
  std::optional<NodeId> visited;  // empty when the branch went Stuck
};

// Steps the next Active branch in strict round-robin order (0, 1, 0, ...).
// Returns nullopt when no branch is Active.
std::optional<StepResult> step_next(const Topology& t, WalkState& w, RngStream& rng);

// Runs branches alternately (branch 0 then branch 1 per round), re-checking
// stop after every branch step; returns as soon as stop holds or every
// branch is inactive. stop is checked once before any stepping, so a
// satisfied predicate returns the initial state untouched.
template <typename Stop>
void run_until(const Topology& t, WalkState& w, Stop&& stop, RngStream& rng) {
  if (stop(std::as_const(w))) return;
  while (w.any_active()) {
    for (std::uint32_t b = 0; b < w.config.branches; ++b) {
      if (w.status[b] != BranchStatus::Active) continue;
      step_branch(t, w, b, rng);
      if (stop(std::as_const(w))) return;
    }
  }
}

// Runs until every branch is Stuck or Exhausted.
void run_to_completion(const Topology& t, WalkState& w, RngStream& rng);

// The walk's node sequence as a single line: branch 1 reversed, then branch
// 0 (the shared origin appears once). For one-branch walks this is branch 0.
std::vector<NodeId> walk_line(const WalkState& w);

}  // namespace drwps
