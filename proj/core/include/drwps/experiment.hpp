#pragma once

#include <span>
#include <string>
#include <vector>

#include "drwps/config.hpp"
#include "drwps/metrics.hpp"

namespace drwps {

// Runs replications x walk-variants and returns one record per pair, sorted
// by (seed, variant). Each replication derives its own seed from the master
// seed, and within it the topology, subscriber-walk, publisher-walk and
// workload streams are independent, so results are identical regardless of
// thread count. threads = 0 means one worker per hardware thread.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// The derived per-replication seed that run_experiment reports in the seed
// column; gen-topology with this seed reproduces the replication's graph.
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint32_t replication);

// Fixed column set, one comment line "# drw-pubsub <version>", then a header
// row and one line per record. Optional fields serialize as empty cells.
std::string records_to_csv(std::span<const MetricsRecord> records);

}  // namespace drwps
