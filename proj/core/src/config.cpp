#include "drwps/config.hpp"

#include <filesystem>
#include <string>

#include "drwps/errors.hpp"
#include "drwps/io.hpp"
#include "drwps/text.hpp"

namespace drwps {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Cooperative: return "cooperative";
    case RunMode::Sequential: return "sequential";
    case RunMode::WalkOnly: return "walk_only";
  }
  return "?";
}

std::optional<RunMode> run_mode_from_string(std::string_view name) {
  if (name == "cooperative") return RunMode::Cooperative;
  if (name == "sequential") return RunMode::Sequential;
  if (name == "walk_only") return RunMode::WalkOnly;
  return std::nullopt;
}

namespace {

[[noreturn]] void config_fail(std::size_t line_no, const std::string& what) {
  throw ConfigError("line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t want_u64(std::string_view value, std::size_t line_no) {
  const auto v = parse_u64(value);
  if (!v) config_fail(line_no, "expected an unsigned integer, got '" + std::string(value) + "'");
  return *v;
}

std::uint32_t want_u32(std::string_view value, std::size_t line_no) {
  const auto v = want_u64(value, line_no);
  if (v > UINT32_MAX) config_fail(line_no, "value out of range");
  return static_cast<std::uint32_t>(v);
}

double want_double(std::string_view value, std::size_t line_no) {
  const auto v = parse_double(value);
  if (!v) config_fail(line_no, "expected a number, got '" + std::string(value) + "'");
  return *v;
}

bool want_bool(std::string_view value, std::size_t line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  config_fail(line_no, "expected true/false, got '" + std::string(value) + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  bool walk_kind_set = false;
  std::size_t walk_section_line = 0;

  auto close_walk_section = [&]() {
    if (section == "walk" && !walk_kind_set) {
      config_fail(walk_section_line, "[walk] section is missing 'kind'");
    }
  };

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') config_fail(line_no, "unterminated section header");
      close_walk_section();
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section == "walk") {
        cfg.walk_variants.emplace_back();
        walk_kind_set = false;
        walk_section_line = line_no;
      } else if (section != "experiment" && section != "topology" &&
                 section != "workload" && section != "filters") {
        config_fail(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) config_fail(line_no, "expected key = value");
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) config_fail(line_no, "empty key");
    if (value.empty()) config_fail(line_no, "empty value for '" + key + "'");

    if (section == "experiment") {
      if (key == "name") {
        cfg.name = std::string(value);
      } else if (key == "replications") {
        cfg.replications = want_u32(value, line_no);
      } else if (key == "master_seed") {
        cfg.master_seed = want_u64(value, line_no);
      } else if (key == "stop_on_first_match") {
        cfg.stop_on_first_match = want_bool(value, line_no);
      } else if (key == "output") {
        cfg.output_path = std::string(value);
      } else {
        config_fail(line_no, "unknown key '" + key + "' in [experiment]");
      }
    } else if (section == "topology") {
      if (key == "n") {
        cfg.topology.n = want_u32(value, line_no);
      } else if (key == "radius") {
        cfg.topology.radius = want_double(value, line_no);
      } else if (key == "edge_list") {
        cfg.topology.edge_list_path = std::string(value);
      } else if (key == "positions") {
        cfg.topology.positions_path = std::string(value);
      } else {
        config_fail(line_no, "unknown key '" + key + "' in [topology]");
      }
    } else if (section == "workload") {
      if (key == "mode") {
        const auto mode = run_mode_from_string(value);
        if (!mode) config_fail(line_no, "unknown mode '" + std::string(value) + "'");
        cfg.workload.mode = *mode;
      } else if (key == "publishers") {
        cfg.workload.publishers = want_u32(value, line_no);
      } else if (key == "subscribers") {
        cfg.workload.subscribers = want_u32(value, line_no);
      } else if (key == "connect_endpoints") {
        cfg.workload.connect_endpoints = want_bool(value, line_no);
      } else if (key == "attributes") {
        cfg.workload.attributes_per_subscription = want_u32(value, line_no);
      } else if (key == "corpus_names") {
        cfg.workload.corpus_names = want_u32(value, line_no);
      } else if (key == "corpus_values") {
        cfg.workload.corpus_values = want_u32(value, line_no);
      } else if (key == "extra_attributes") {
        cfg.workload.extra_attributes = want_u32(value, line_no);
      } else if (key == "matching") {
        cfg.workload.matching = want_bool(value, line_no);
      } else {
        config_fail(line_no, "unknown key '" + key + "' in [workload]");
      }
    } else if (section == "filters") {
      if (key == "bits") {
        cfg.filters.bits = want_u32(value, line_no);
      } else if (key == "hashes") {
        cfg.filters.hashes = want_u32(value, line_no);
      } else {
        config_fail(line_no, "unknown key '" + key + "' in [filters]");
      }
    } else if (section == "walk") {
      WalkConfig& wc = cfg.walk_variants.back();
      if (key == "kind") {
        const auto kind = walk_kind_from_string(value);
        if (!kind) config_fail(line_no, "unknown walk kind '" + std::string(value) + "'");
        wc.kind = *kind;
        walk_kind_set = true;
      } else if (key == "branches") {
        wc.branches = want_u32(value, line_no);
      } else if (key == "alpha") {
        wc.alpha = want_double(value, line_no);
      } else if (key == "beta") {
        wc.beta = want_double(value, line_no);
      } else if (key == "penalty") {
        wc.penalty = want_double(value, line_no);
      } else if (key == "max_steps") {
        wc.max_steps = want_u32(value, line_no);
      } else if (key == "tie") {
        const auto rule = tie_rule_from_string(value);
        if (!rule) config_fail(line_no, "unknown tie rule '" + std::string(value) + "'");
        wc.tie = *rule;
      } else if (key == "pure_unrestricted") {
        wc.pure_unrestricted = want_bool(value, line_no);
      } else if (key == "maximize") {
        wc.maximize_score = want_bool(value, line_no);
      } else {
        config_fail(line_no, "unknown key '" + key + "' in [walk]");
      }
    } else {
      config_fail(line_no, "key outside of any section");
    }
  }
  close_walk_section();

  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (walk_variants.empty()) throw ConfigError("at least one [walk] section is required");

  const bool generated = topology.n.has_value() || topology.radius.has_value();
  const bool loaded = !topology.edge_list_path.empty();
  if (generated && loaded) {
    throw ConfigError("[topology] takes either n/radius or edge_list, not both");
  }
  if (!loaded) {
    if (!topology.n || !topology.radius) {
      throw ConfigError("[topology] needs n and radius (or an edge_list path)");
    }
    if (*topology.n < 1) throw ConfigError("topology n must be at least 1");
    if (!(*topology.radius > 0.0)) throw ConfigError("topology radius must be positive");
  }
  if (!topology.positions_path.empty() && !loaded) {
    throw ConfigError("[topology] positions only apply to edge_list topologies");
  }

  if (workload.mode == RunMode::Cooperative &&
      (workload.publishers != 1 || workload.subscribers != 1)) {
    throw ConfigError("cooperative mode runs exactly one publisher and one subscriber");
  }
  if (workload.mode != RunMode::WalkOnly) {
    if (workload.publishers < 1 || workload.subscribers < 1) {
      throw ConfigError("workload needs at least one publisher and one subscriber");
    }
    if (workload.attributes_per_subscription < 1) {
      throw ConfigError("attributes per subscription must be at least 1");
    }
    if (workload.corpus_names < workload.attributes_per_subscription) {
      throw ConfigError("corpus_names must be at least the per-subscription attribute count");
    }
    if (workload.corpus_values < 1) throw ConfigError("corpus_values must be at least 1");
  }

  try {
    SubscriptionFilter probe(filters.bits, filters.hashes);
    (void)probe;
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("[filters]: ") + e.what());
  }

  for (std::size_t i = 0; i < walk_variants.size(); ++i) {
    WalkConfig wc = walk_variants[i];
    if (wc.max_steps == 0) wc.max_steps = 1;  // placeholder; resolved per topology
    try {
      wc.validate();
    } catch (const ParameterError& e) {
      throw ConfigError("walk variant " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig cfg = parse_experiment_config(read_file(path));
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) {
      p = (base / p).string();
    }
  };
  resolve(cfg.topology.edge_list_path);
  resolve(cfg.topology.positions_path);
  return cfg;
}

}  // namespace drwps
