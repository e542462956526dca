#include "drwps/walks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drwps/errors.hpp"

namespace drwps {

std::string_view to_string(WalkKind kind) {
  switch (kind) {
    case WalkKind::PureRandom: return "pure_random";
    case WalkKind::DrwWeighted: return "drw_weighted";
    case WalkKind::DrwMarking: return "drw_marking";
  }
  return "?";
}

std::string_view to_string(TieRule rule) {
  return rule == TieRule::SmallestId ? "smallest" : "random";
}

std::optional<WalkKind> walk_kind_from_string(std::string_view name) {
  if (name == "pure_random") return WalkKind::PureRandom;
  if (name == "drw_weighted") return WalkKind::DrwWeighted;
  if (name == "drw_marking") return WalkKind::DrwMarking;
  return std::nullopt;
}

std::optional<TieRule> tie_rule_from_string(std::string_view name) {
  if (name == "smallest") return TieRule::SmallestId;
  if (name == "random") return TieRule::Random;
  return std::nullopt;
}

void WalkConfig::validate() const {
  if (branches != 1 && branches != 2) {
    throw ParameterError("walk branches must be 1 or 2");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(penalty >= 0.0) ||
      !std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(penalty)) {
    throw ParameterError("alpha, beta and penalty must be finite and nonnegative");
  }
  if (max_steps < 1) throw ParameterError("max_steps must be at least 1");
  if (kind == WalkKind::DrwMarking && alpha == 0.0 && beta == 0.0) {
    throw ParameterError("alpha and beta must not both be zero for a marking walk");
  }
}

std::uint32_t default_max_steps(std::uint32_t node_count) {
  const double steps = 10.0 * std::sqrt(static_cast<double>(node_count));
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround(steps)));
}

bool WalkState::any_active() const {
  return std::any_of(status.begin(), status.end(),
                     [](BranchStatus s) { return s == BranchStatus::Active; });
}

namespace {

// Extends in_first_hood with N(v) and in_second_hood with the neighborhoods
// of nodes newly entering in_first_hood. Nodes already in the first
// neighborhood contributed their neighbors when they entered, so the two
// flags track exactly N(members) and N(N(members)).
void mark_node(const Topology& t, WalkState& w, NodeId v) {
  for (NodeId a : t.neighbors(v)) {
    if (!w.in_first_hood[a]) {
      w.in_first_hood[a] = 1;
      for (NodeId b : t.neighbors(a)) w.in_second_hood[b] = 1;
    }
  }
}

// Adds a just-chosen node to the walk's bookkeeping. stamp = total_steps
// after the increment, so the origin sits at 0 and the first step at 1.
void admit_node(const Topology& t, WalkState& w, std::uint32_t branch, NodeId chosen) {
  w.branch_paths[branch].push_back(chosen);
  ++w.steps_taken[branch];
  ++w.total_steps;
  if (!w.member_flag[chosen]) {
    w.member_flag[chosen] = 1;
    w.members.push_back(chosen);
    w.member_stamps.push_back(w.total_steps);
    if (w.config.kind == WalkKind::DrwWeighted) w.penalties[chosen] += w.config.penalty;
    if (w.config.kind == WalkKind::DrwMarking) mark_node(t, w, chosen);
  }
  if (w.steps_taken[branch] >= w.config.max_steps) {
    w.status[branch] = BranchStatus::Exhausted;
  }
}

std::uint32_t count_flagged(std::span<const NodeId> nodes, const std::vector<std::uint8_t>& flag) {
  std::uint32_t c = 0;
  for (NodeId v : nodes) c += flag[v] != 0;
  return c;
}

// Argmin (or argmax) over candidates, candidates already ascending by id.
// Score equality is exact: both the stepper and the test oracles build
// scores with the same expression, so ties are bit-reproducible.
NodeId select_scored(const std::vector<NodeId>& candidates, const std::vector<double>& scores,
                     const WalkConfig& cfg, RngStream& rng) {
  double best = scores[0];
  for (double s : scores) {
    if (cfg.maximize_score ? s > best : s < best) best = s;
  }
  std::vector<NodeId> tied;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (scores[i] == best) tied.push_back(candidates[i]);
  }
  if (cfg.tie == TieRule::SmallestId || tied.size() == 1) return tied.front();
  return tied[rng.uniform_index(tied.size())];
}

}  // namespace

WalkState start_walk(const Topology& t, NodeId origin, const WalkConfig& cfg) {
  cfg.validate();
  if (origin >= t.size()) throw ParameterError("walk origin out of range");

  WalkState w;
  w.config = cfg;
  w.origin = origin;
  w.branch_paths.assign(cfg.branches, std::vector<NodeId>{origin});
  w.steps_taken.assign(cfg.branches, 0);
  w.status.assign(cfg.branches,
                  t.degree(origin) == 0 ? BranchStatus::Stuck : BranchStatus::Active);
  w.member_flag.assign(t.size(), 0);
  w.member_flag[origin] = 1;
  w.members = {origin};
  w.member_stamps = {0};
  if (cfg.kind == WalkKind::DrwWeighted) {
    w.penalties.assign(t.size(), 0.0);
    w.penalties[origin] += cfg.penalty;
  }
  if (cfg.kind == WalkKind::DrwMarking) {
    w.in_first_hood.assign(t.size(), 0);
    w.in_second_hood.assign(t.size(), 0);
    mark_node(t, w, origin);
  }
  return w;
}

std::uint32_t weight_two_hop(const Topology& t, NodeId x, NodeId z) {
  const auto a = t.neighbors(x);
  const auto b = t.neighbors(z);
  std::uint32_t count = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

namespace {

std::uint32_t sorted_intersection_count(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::uint32_t count = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

double cost_marking(const Topology& t, NodeId v, std::span<const NodeId> drw_members,
                    double alpha, double beta) {
  if (drw_members.empty()) throw ParameterError("cost_marking needs a nonempty walk set");
  const auto nbrs = t.neighbors(v);
  const auto first = neighborhood_of_set(t, drw_members);
  const auto second = neighborhood_of_set(t, first);
  const std::uint32_t c1 = sorted_intersection_count(nbrs, first);
  const std::uint32_t c2 = sorted_intersection_count(nbrs, second);
  return alpha * static_cast<double>(c1) + beta * static_cast<double>(c2);
}

std::optional<NodeId> step_branch(const Topology& t, WalkState& w, std::uint32_t branch,
                                  RngStream& rng) {
  if (branch >= w.branch_paths.size()) throw ParameterError("branch index out of range");
  if (w.member_flag.size() != t.size()) {
    throw StateError("walk state belongs to a different topology");
  }
  if (w.status[branch] != BranchStatus::Active) {
    throw StateError("step_branch on a branch that is not active");
  }

  const NodeId tip = w.branch_paths[branch].back();
  const bool unrestricted =
      w.config.kind == WalkKind::PureRandom && w.config.pure_unrestricted;
  std::vector<NodeId> candidates;
  for (NodeId z : t.neighbors(tip)) {
    if (unrestricted || !w.member_flag[z]) candidates.push_back(z);
  }
  if (candidates.empty()) {
    w.status[branch] = BranchStatus::Stuck;
    return std::nullopt;
  }

  NodeId chosen = 0;
  switch (w.config.kind) {
    case WalkKind::PureRandom: {
      chosen = candidates[rng.uniform_index(candidates.size())];
      break;
    }
    case WalkKind::DrwWeighted: {
      const auto& path = w.branch_paths[branch];
      const NodeId x = path.size() >= 2 ? path[path.size() - 2] : w.origin;
      std::vector<double> scores(candidates.size());
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        scores[i] = static_cast<double>(weight_two_hop(t, x, candidates[i])) +
                    w.penalties[candidates[i]];
      }
      chosen = select_scored(candidates, scores, w.config, rng);
      break;
    }
    case WalkKind::DrwMarking: {
      std::vector<NodeId> pool;
      for (NodeId z : candidates) {
        if (!w.is_marked(z)) pool.push_back(z);
      }
      if (pool.empty()) pool = std::move(candidates);
      std::vector<double> scores(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto nbrs = t.neighbors(pool[i]);
        scores[i] =
            w.config.alpha * static_cast<double>(count_flagged(nbrs, w.in_first_hood)) +
            w.config.beta * static_cast<double>(count_flagged(nbrs, w.in_second_hood));
      }
      chosen = select_scored(pool, scores, w.config, rng);
      break;
    }
  }

  admit_node(t, w, branch, chosen);
  return chosen;
}

std::optional<StepResult> step_next(const Topology& t, WalkState& w, RngStream& rng) {
  for (std::uint32_t i = 0; i < w.config.branches; ++i) {
    const std::uint32_t b = (w.next_branch + i) % w.config.branches;
    if (w.status[b] != BranchStatus::Active) continue;
    StepResult r;
    r.branch = b;
    r.visited = step_branch(t, w, b, rng);
    w.next_branch = (b + 1) % w.config.branches;
    return r;
  }
  return std::nullopt;
}

void run_to_completion(const Topology& t, WalkState& w, RngStream& rng) {
  run_until(t, w, [](const WalkState&) { return false; }, rng);
}

std::vector<NodeId> walk_line(const WalkState& w) {
  if (w.branch_paths.size() == 1) return w.branch_paths[0];
  std::vector<NodeId> line(w.branch_paths[1].rbegin(), w.branch_paths[1].rend());
  line.insert(line.end(), w.branch_paths[0].begin() + 1, w.branch_paths[0].end());
  return line;
}

}  // namespace drwps
