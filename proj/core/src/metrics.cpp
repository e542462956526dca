#include "drwps/metrics.hpp"

#include <algorithm>
#include <unordered_map>

#include "drwps/errors.hpp"

namespace drwps {

double gini_coefficient(std::span<const std::uint64_t> loads) {
  if (loads.empty()) return 0.0;
  std::vector<std::uint64_t> sorted(loads.begin(), loads.end());
  std::sort(sorted.begin(), sorted.end());

  const double u = static_cast<double>(sorted.size());
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto x = static_cast<double>(sorted[i]);
    weighted += static_cast<double>(i + 1) * x;
    total += x;
  }
  if (total == 0.0) return 0.0;
  return 2.0 * weighted / (u * total) - (u + 1.0) / u;
}

LoadProfile load_profile(std::span<const LoadEvent> events, std::uint32_t node_count) {
  LoadProfile p;
  p.per_node_load.assign(node_count, 0);
  for (const LoadEvent& e : events) {
    if (e.node >= node_count) throw ParameterError("load event node out of range");
    ++p.per_node_load[e.node];
  }
  p.total_events = events.size();

  std::vector<std::uint64_t> used;
  for (std::uint64_t load : p.per_node_load) {
    if (load > 0) {
      used.push_back(load);
      p.max_load = std::max(p.max_load, load);
    }
  }
  p.nodes_used = static_cast<std::uint32_t>(used.size());
  p.gini = gini_coefficient(used);
  return p;
}

std::optional<double> euclidean_displacement(const Topology& t, std::span<const NodeId> path) {
  if (path.empty()) throw ParameterError("displacement of an empty path");
  if (!t.has_positions()) return std::nullopt;
  return euclidean(t.position(path.front()), t.position(path.back()));
}

std::optional<std::uint32_t> intersection_step(std::span<const StampedNode> a,
                                               std::span<const StampedNode> b) {
  std::unordered_map<NodeId, std::uint32_t> stamps;
  stamps.reserve(a.size());
  for (const StampedNode& s : a) stamps.emplace(s.node, s.stamp);

  std::optional<std::uint32_t> best;
  for (const StampedNode& s : b) {
    const auto it = stamps.find(s.node);
    if (it == stamps.end()) continue;
    const std::uint32_t round = std::max(it->second, s.stamp);
    if (!best || round < *best) best = round;
  }
  return best;
}

std::vector<StampedNode> stamped_members(const WalkState& w) {
  std::vector<StampedNode> out;
  out.reserve(w.members.size());
  for (std::size_t i = 0; i < w.members.size(); ++i) {
    out.push_back({w.members[i], w.member_stamps[i]});
  }
  return out;
}

}  // namespace drwps
