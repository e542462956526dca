// Command-line front end: run experiment configs, summarize result CSVs and
// generate unit-disk topologies. Exit codes: 0 success, 2 bad configuration
// or arguments, 3 I/O failure.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drwps/config.hpp"
#include "drwps/errors.hpp"
#include "drwps/experiment.hpp"
#include "drwps/io.hpp"
#include "drwps/summary.hpp"
#include "drwps/topology.hpp"
#include "drwps/version.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::string out_path;
  unsigned threads = 1;
};

struct SummarizeArgs {
  std::string in_path;
  std::vector<std::string> group_by;
  std::string out_path;  // empty: stdout
};

struct GenTopologyArgs {
  std::uint32_t n = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string positions_out;  // empty: skip
};

int do_run(const RunArgs& args) {
  drwps::ExperimentConfig cfg = drwps::load_experiment_config(args.config_path);
  std::string out = args.out_path.empty() ? cfg.output_path : args.out_path;
  if (out.empty()) {
    throw drwps::ConfigError("no output path: pass --out or set output in [experiment]");
  }
  const std::vector<drwps::MetricsRecord> records = drwps::run_experiment(cfg, args.threads);
  drwps::write_file(out, drwps::records_to_csv(records));
  std::cerr << records.size() << " records -> " << out << '\n';
  return 0;
}

int do_summarize(const SummarizeArgs& args) {
  const drwps::CsvTable table = drwps::parse_csv(drwps::read_file(args.in_path));
  const drwps::SummaryTable summary = drwps::summarize_table(table, args.group_by);
  const std::string csv = drwps::summary_to_csv(summary);
  if (args.out_path.empty()) {
    std::cout << csv;
  } else {
    drwps::write_file(args.out_path, csv);
  }
  return 0;
}

int do_gen_topology(const GenTopologyArgs& args) {
  const drwps::Topology topo = drwps::Topology::unit_disk(args.n, args.radius, args.seed);
  drwps::write_file(args.out_path, topo.to_edge_list());
  if (!args.positions_out.empty()) {
    drwps::write_file(args.positions_out, topo.to_position_list());
  }
  std::cerr << topo.size() << " nodes, " << topo.edge_count() << " edges -> " << args.out_path
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional random walk pub/sub simulator"};
  app.set_version_flag("--version", std::string("drw-pubsub ") + drwps::kVersion);
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config and write a results CSV");
  run->add_option("--config", run_args.config_path, "Experiment config file")->required();
  run->add_option("--out", run_args.out_path, "Results CSV path (default: output= in config)");
  run->add_option("--threads", run_args.threads,
                  "Worker threads; 0 = all hardware threads (results are identical)");

  SummarizeArgs sum_args;
  CLI::App* summarize =
      app.add_subcommand("summarize", "Group a results CSV and report per-field moments");
  summarize->add_option("--in", sum_args.in_path, "Results CSV path")->required();
  summarize->add_option("--group-by", sum_args.group_by, "Comma-separated key columns")
      ->delimiter(',');
  summarize->add_option("--out", sum_args.out_path, "Summary CSV path (default: stdout)");

  GenTopologyArgs gen_args;
  CLI::App* gen =
      app.add_subcommand("gen-topology", "Generate a unit-disk graph as an edge list");
  gen->add_option("--n", gen_args.n, "Node count")->required();
  gen->add_option("--radius", gen_args.radius, "Connection radius in the unit square")->required();
  gen->add_option("--seed", gen_args.seed, "Placement seed");
  gen->add_option("--out", gen_args.out_path, "Edge-list output path")->required();
  gen->add_option("--positions-out", gen_args.positions_out, "Also write node positions here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, bad usage is a config error
  }

  try {
    if (run->parsed()) return do_run(run_args);
    if (summarize->parsed()) return do_summarize(sum_args);
    if (gen->parsed()) return do_gen_topology(gen_args);
    return 2;  // unreachable with require_subcommand(1)
  } catch (const drwps::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
