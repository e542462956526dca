#include "drwps/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "drwps/errors.hpp"
#include "drwps/rng.hpp"
#include "drwps/text.hpp"

namespace drwps {

double euclidean(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

void Topology::check_node(NodeId a) const {
  if (a >= n_) {
    throw ParameterError("node id " + std::to_string(a) + " out of range (n = " +
                         std::to_string(n_) + ")");
  }
}

std::span<const NodeId> Topology::neighbors(NodeId a) const {
  check_node(a);
  const std::uint64_t begin = offsets_[a];
  const std::uint64_t end = offsets_[a + 1];
  return {adjacency_.data() + begin, adjacency_.data() + end};
}

std::uint32_t Topology::degree(NodeId a) const {
  check_node(a);
  return static_cast<std::uint32_t>(offsets_[a + 1] - offsets_[a]);
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto nbrs = neighbors(a);
  check_node(b);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

Vec2 Topology::position(NodeId a) const {
  check_node(a);
  if (!has_positions()) throw StateError("topology carries no positions");
  return positions_[a];
}

void Topology::build_csr(std::uint32_t n, std::vector<std::pair<NodeId, NodeId>>& edges) {
  n_ = n;
  for (auto& [a, b] : edges) {
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [a, b] : edges) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];

  adjacency_.resize(offsets_[n]);
  std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    adjacency_[cursor[a]++] = b;
    adjacency_[cursor[b]++] = a;
  }
  for (NodeId v = 0; v < n; ++v) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
  }
}

namespace {

// Bucket grid for unit-disk edge generation. Cell width >= radius, so all
// edges run within a cell or between 8-adjacent cells.
struct CellGrid {
  std::uint32_t cells;
  std::vector<std::vector<NodeId>> buckets;

  CellGrid(const std::vector<Vec2>& pts, double radius) {
    cells = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::floor(1.0 / radius)));
    buckets.resize(static_cast<std::size_t>(cells) * cells);
    for (NodeId i = 0; i < pts.size(); ++i) {
      buckets[index_of(pts[i])].push_back(i);
    }
  }

  std::uint32_t coord(double x) const {
    const auto c = static_cast<std::uint32_t>(x * cells);
    return std::min(c, cells - 1);
  }

  std::size_t index_of(Vec2 p) const {
    return static_cast<std::size_t>(coord(p.y)) * cells + coord(p.x);
  }
};

std::vector<std::pair<NodeId, NodeId>> disk_edges(const std::vector<Vec2>& pts, double radius) {
  const double r2 = radius * radius;
  std::vector<std::pair<NodeId, NodeId>> edges;
  const CellGrid grid(pts, radius);

  auto close = [&](NodeId i, NodeId j) {
    const double dx = pts[i].x - pts[j].x;
    const double dy = pts[i].y - pts[j].y;
    return dx * dx + dy * dy <= r2;
  };

  // Each unordered cell pair is visited once: within-cell, plus the four
  // "forward" neighbor offsets.
  static constexpr int kForward[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  const std::uint32_t cells = grid.cells;
  for (std::uint32_t cy = 0; cy < cells; ++cy) {
    for (std::uint32_t cx = 0; cx < cells; ++cx) {
      const auto& here = grid.buckets[static_cast<std::size_t>(cy) * cells + cx];
      for (std::size_t a = 0; a < here.size(); ++a) {
        for (std::size_t b = a + 1; b < here.size(); ++b) {
          if (close(here[a], here[b])) edges.emplace_back(here[a], here[b]);
        }
      }
      for (const auto& [dx, dy] : kForward) {
        const std::int64_t nx = static_cast<std::int64_t>(cx) + dx;
        const std::int64_t ny = static_cast<std::int64_t>(cy) + dy;
        if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
        const auto& there = grid.buckets[static_cast<std::size_t>(ny) * cells + nx];
        for (NodeId i : here) {
          for (NodeId j : there) {
            if (close(i, j)) edges.emplace_back(i, j);
          }
        }
      }
    }
  }
  return edges;
}

void check_disk_parameters(std::size_t n, double radius) {
  if (n < 1) throw ParameterError("node count must be at least 1");
  if (n > std::numeric_limits<NodeId>::max()) throw ParameterError("node count too large");
  if (!(radius > 0.0) || !(radius <= std::sqrt(2.0))) {
    throw ParameterError("radius must be in (0, sqrt(2)]");
  }
}

}  // namespace

Topology Topology::unit_disk(std::uint32_t n, double radius, std::uint64_t seed) {
  check_disk_parameters(n, radius);
  RngStream rng(seed, Stream::Topology);
  std::vector<Vec2> pts(n);
  for (auto& p : pts) {
    p.x = rng.next_unit();
    p.y = rng.next_unit();
  }
  return unit_disk_from_positions(std::move(pts), radius);
}

Topology Topology::unit_disk_from_positions(std::vector<Vec2> positions, double radius) {
  check_disk_parameters(positions.size(), radius);
  for (const Vec2& p : positions) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw ParameterError("positions must lie in the unit square");
    }
  }
  auto edges = disk_edges(positions, radius);
  Topology t;
  t.build_csr(static_cast<std::uint32_t>(positions.size()), edges);
  t.positions_ = std::move(positions);
  t.radius_ = radius;
  return t;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

// Strips an inline '#' comment, then trims.
std::string_view strip_comment(std::string_view line) {
  const std::size_t hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return trim(line);
}

}  // namespace

Topology Topology::from_edge_list(std::string_view text,
                                  std::optional<std::string_view> positions_text) {
  constexpr std::uint64_t kMaxId = std::numeric_limits<NodeId>::max() - 1;

  std::vector<std::pair<NodeId, NodeId>> edges;
  std::uint64_t max_id = 0;
  bool any_node = false;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view body = strip_comment(lines[i]);
    if (body.empty()) continue;
    const auto tokens = split_ws(body);
    if (tokens.size() != 2) parse_fail(line_no, "expected two node ids");
    const auto a = parse_u64(tokens[0]);
    const auto b = parse_u64(tokens[1]);
    if (!a || !b) parse_fail(line_no, "expected two node ids");
    if (*a > kMaxId || *b > kMaxId) parse_fail(line_no, "node id out of range");
    if (*a == *b) parse_fail(line_no, "self-loop " + std::string(tokens[0]));
    edges.emplace_back(static_cast<NodeId>(*a), static_cast<NodeId>(*b));
    max_id = std::max({max_id, *a, *b});
    any_node = true;
  }

  std::vector<Vec2> positions;
  if (positions_text) {
    std::vector<std::pair<NodeId, Vec2>> entries;
    const auto plines = split_lines(*positions_text);
    for (std::size_t i = 0; i < plines.size(); ++i) {
      const std::size_t line_no = i + 1;
      const std::string_view body = strip_comment(plines[i]);
      if (body.empty()) continue;
      const auto tokens = split_ws(body);
      if (tokens.size() != 3) parse_fail(line_no, "expected 'id x y'");
      const auto id = parse_u64(tokens[0]);
      const auto x = parse_double(tokens[1]);
      const auto y = parse_double(tokens[2]);
      if (!id || !x || !y) parse_fail(line_no, "expected 'id x y'");
      if (*id > kMaxId) parse_fail(line_no, "node id out of range");
      if (!(*x >= 0.0 && *x <= 1.0 && *y >= 0.0 && *y <= 1.0)) {
        parse_fail(line_no, "coordinates must lie in [0,1]");
      }
      entries.emplace_back(static_cast<NodeId>(*id), Vec2{*x, *y});
      max_id = std::max<std::uint64_t>(max_id, *id);
      any_node = true;
    }
    if (!entries.empty()) {
      positions.resize(max_id + 1);
      std::vector<bool> seen(max_id + 1, false);
      for (const auto& [id, p] : entries) {
        if (seen[id]) throw ParseError("duplicate position for node " + std::to_string(id));
        seen[id] = true;
        positions[id] = p;
      }
      for (std::uint64_t v = 0; v <= max_id; ++v) {
        if (!seen[v]) throw ParseError("missing position for node " + std::to_string(v));
      }
    }
  }

  Topology t;
  const std::uint32_t n = any_node ? static_cast<std::uint32_t>(max_id + 1) : 0;
  t.build_csr(n, edges);
  t.positions_ = std::move(positions);
  return t;
}

std::string Topology::to_edge_list() const {
  std::string out = "# " + std::to_string(n_) + " nodes, " +
                    std::to_string(edge_count()) + " edges\n";
  for (NodeId a = 0; a < n_; ++a) {
    for (NodeId b : neighbors(a)) {
      if (a < b) {
        out += std::to_string(a);
        out += ' ';
        out += std::to_string(b);
        out += '\n';
      }
    }
  }
  return out;
}

std::string Topology::to_position_list() const {
  if (!has_positions()) throw StateError("topology carries no positions");
  std::string out;
  for (NodeId v = 0; v < n_; ++v) {
    out += std::to_string(v);
    out += ' ';
    out += format_double(positions_[v].x);
    out += ' ';
    out += format_double(positions_[v].y);
    out += '\n';
  }
  return out;
}

std::vector<NodeId> neighborhood_of_set(const Topology& t, std::span<const NodeId> s) {
  std::vector<NodeId> out;
  for (NodeId v : s) {
    const auto nbrs = t.neighbors(v);
    out.insert(out.end(), nbrs.begin(), nbrs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> connected_component(const Topology& t, NodeId a) {
  if (a >= t.size()) throw ParameterError("node id out of range");
  std::vector<bool> visited(t.size(), false);
  std::deque<NodeId> frontier{a};
  visited[a] = true;
  std::vector<NodeId> component;
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop_front();
    component.push_back(v);
    for (NodeId w : t.neighbors(v)) {
      if (!visited[w]) {
        visited[w] = true;
        frontier.push_back(w);
      }
    }
  }
  std::sort(component.begin(), component.end());
  return component;
}

}  // namespace drwps
