#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drwps/brokerage.hpp"
#include "drwps/walks.hpp"

namespace drwps {

// How a replication exercises the brokerage layer:
//   Cooperative: one subscriber and one publisher walk in lockstep.
//   Sequential: all subscriptions deployed fully, then publishers walk.
//   WalkOnly: a single walk, no brokerage; for path-shape studies.
enum class RunMode { Cooperative, Sequential, WalkOnly };

std::string_view to_string(RunMode mode);
std::optional<RunMode> run_mode_from_string(std::string_view name);

// Either generated (n + radius) or loaded from an edge-list file, with an
// optional position companion.
struct TopologySpec {
  std::optional<std::uint32_t> n;
  std::optional<double> radius;
  std::string edge_list_path;
  std::string positions_path;
};

struct WorkloadSpec {
  RunMode mode = RunMode::Sequential;
  std::uint32_t publishers = 1;
  std::uint32_t subscribers = 1;
  // Endpoints are resampled (the graph never is) until all principals share
  // a component; after repeated failures they are drawn from the largest
  // component directly.
  bool connect_endpoints = true;
  std::uint32_t attributes_per_subscription = 3;
  std::uint32_t corpus_names = 16;   // attribute-name corpus size
  std::uint32_t corpus_values = 8;   // values per name
  std::uint32_t extra_attributes = 1;  // additional pairs on each notification
  // true: notifications carry every subscription's pairs, so every pair
  // should be delivered; false: notification attributes are drawn fresh.
  bool matching = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint32_t replications = 1;
  std::uint64_t master_seed = 0;
  bool stop_on_first_match = false;
  std::string output_path;  // default for the CLI's --out

  TopologySpec topology;
  WorkloadSpec workload;
  FilterParams filters;
  // One record per (replication, variant). max_steps 0 means the per-graph
  // default TTL, resolved when the topology's size is known.
  std::vector<WalkConfig> walk_variants;

  // Semantic checks beyond syntax; throws ConfigError.
  void validate() const;
};

// Parses the INI-style grammar documented in the README. Throws ConfigError
// with a 1-based line number on syntax errors, and runs validate().
ExperimentConfig parse_experiment_config(std::string_view text);

// read_file + parse; file paths inside the config resolve relative to the
// config file's directory.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace drwps
