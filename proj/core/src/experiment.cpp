#include "drwps/experiment.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "drwps/errors.hpp"
#include "drwps/io.hpp"
#include "drwps/text.hpp"
#include "drwps/version.hpp"

namespace drwps {

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint32_t replication) {
  return derive_seed(master_seed, {replication});
}

namespace {

struct RepWorkload {
  std::vector<Subscription> subscriptions;
  std::vector<Notification> notifications;
  NodeId walk_origin = 0;  // WalkOnly mode
};

std::vector<NodeId> sample_distinct_nodes(RngStream& rng, std::span<const NodeId> pool,
                                          std::uint32_t count) {
  std::vector<NodeId> ids(pool.begin(), pool.end());
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t j = i + rng.uniform_index(ids.size() - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  return ids;
}

bool all_in_component(const Topology& t, std::span<const NodeId> nodes) {
  const auto comp = connected_component(t, nodes.front());
  return std::all_of(nodes.begin(), nodes.end(), [&](NodeId v) {
    return std::binary_search(comp.begin(), comp.end(), v);
  });
}

// All principals in one component: resample the endpoint tuple (never the
// graph), then fall back to drawing from the largest component outright.
std::vector<NodeId> sample_endpoints(const Topology& t, RngStream& rng, std::uint32_t count,
                                     bool connected) {
  std::vector<NodeId> everyone(t.size());
  std::iota(everyone.begin(), everyone.end(), 0);
  if (count > t.size()) {
    throw ConfigError("workload needs " + std::to_string(count) + " distinct nodes but the topology has " +
                      std::to_string(t.size()));
  }

  if (!connected || count <= 1) return sample_distinct_nodes(rng, everyone, count);

  constexpr int kAttempts = 200;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    auto picked = sample_distinct_nodes(rng, everyone, count);
    if (all_in_component(t, picked)) return picked;
  }

  std::vector<bool> assigned(t.size(), false);
  std::vector<NodeId> largest;
  for (NodeId v = 0; v < t.size(); ++v) {
    if (assigned[v]) continue;
    auto comp = connected_component(t, v);
    for (NodeId u : comp) assigned[u] = true;
    if (comp.size() > largest.size()) largest = std::move(comp);
  }
  if (largest.size() < count) {
    throw ConfigError("no component is large enough for " + std::to_string(count) +
                      " connected principals");
  }
  return sample_distinct_nodes(rng, largest, count);
}

std::vector<AttributePair> draw_attributes(RngStream& rng, const WorkloadSpec& wl) {
  std::vector<std::uint32_t> names(wl.corpus_names);
  std::iota(names.begin(), names.end(), 0);
  std::vector<AttributePair> attrs;
  attrs.reserve(wl.attributes_per_subscription);
  for (std::uint32_t i = 0; i < wl.attributes_per_subscription; ++i) {
    const std::uint64_t j = i + rng.uniform_index(names.size() - i);
    std::swap(names[i], names[j]);
    attrs.emplace_back("k" + std::to_string(names[i]),
                       "v" + std::to_string(rng.uniform_index(wl.corpus_values)));
  }
  return attrs;
}

RepWorkload build_workload(const Topology& t, const WorkloadSpec& wl, RngStream& rng) {
  RepWorkload out;
  if (wl.mode == RunMode::WalkOnly) {
    out.walk_origin = static_cast<NodeId>(rng.uniform_index(t.size()));
    return out;
  }

  const std::uint32_t count = wl.subscribers + wl.publishers;
  const auto endpoints = sample_endpoints(t, rng, count, wl.connect_endpoints);

  for (std::uint32_t i = 0; i < wl.subscribers; ++i) {
    Subscription sub;
    sub.subscriber = endpoints[i];
    sub.id = i + 1;
    sub.attributes = draw_attributes(rng, wl);
    out.subscriptions.push_back(std::move(sub));
  }

  for (std::uint32_t j = 0; j < wl.publishers; ++j) {
    Notification note;
    note.publisher = endpoints[wl.subscribers + j];
    note.id = 1000001 + j;
    if (wl.matching) {
      // Carry every subscription's pairs so each pair should deliver;
      // extras use the x-value namespace so they never collide with them.
      for (const auto& sub : out.subscriptions) {
        for (const auto& attr : sub.attributes) {
          if (std::find(note.attributes.begin(), note.attributes.end(), attr) ==
              note.attributes.end()) {
            note.attributes.push_back(attr);
          }
        }
      }
    } else {
      note.attributes = draw_attributes(rng, wl);
    }
    for (std::uint32_t e = 0; e < wl.extra_attributes; ++e) {
      note.attributes.emplace_back(
          "k" + std::to_string(rng.uniform_index(wl.corpus_names)),
          "x" + std::to_string(rng.uniform_index(wl.corpus_values)));
    }
    out.notifications.push_back(std::move(note));
  }
  return out;
}

// True when every subscription attribute occurs canonically in the note.
bool exact_pair_match(const Subscription& sub, const Notification& note) {
  std::vector<std::string> note_elems;
  note_elems.reserve(note.attributes.size());
  for (const auto& attr : note.attributes) note_elems.push_back(canonical_attribute(attr));
  std::sort(note_elems.begin(), note_elems.end());
  return std::all_of(sub.attributes.begin(), sub.attributes.end(), [&](const AttributePair& a) {
    return std::binary_search(note_elems.begin(), note_elems.end(), canonical_attribute(a));
  });
}

MetricsRecord base_record(const ExperimentConfig& cfg, const Topology& t,
                          std::uint64_t rep_seed, const WalkConfig& wc,
                          std::uint32_t variant_index) {
  MetricsRecord r;
  r.seed = rep_seed;
  r.n = t.size();
  r.radius = t.radius();
  r.kind = wc.kind;
  r.branches = wc.branches;
  r.alpha = wc.alpha;
  r.beta = wc.beta;
  r.penalty = wc.penalty;
  r.ttl = wc.max_steps;
  r.variant_index = variant_index;
  switch (cfg.workload.mode) {
    case RunMode::Cooperative: r.cooperative = true; break;
    case RunMode::Sequential: r.cooperative = false; break;
    case RunMode::WalkOnly: break;
  }
  return r;
}

void fill_walk_columns(MetricsRecord& r, const Topology& t, const WalkState& a,
                       const WalkState* b) {
  r.path_hops_a = a.total_steps;
  r.euclid_a = euclidean_displacement(t, walk_line(a));
  if (b) {
    r.path_hops_b = b->total_steps;
    r.euclid_b = euclidean_displacement(t, walk_line(*b));
  }
}

void fill_load_columns(MetricsRecord& r, std::span<const LoadEvent> events,
                       std::uint32_t node_count) {
  const LoadProfile p = load_profile(events, node_count);
  r.nodes_used = p.nodes_used;
  r.max_load = p.max_load;
  r.gini = p.gini;
}

MetricsRecord run_variant(const ExperimentConfig& cfg, const Topology& t,
                          std::uint64_t rep_seed, const RepWorkload& wl,
                          const WalkConfig& wc, std::uint32_t variant_index) {
  MetricsRecord r = base_record(cfg, t, rep_seed, wc, variant_index);

  if (cfg.workload.mode == RunMode::WalkOnly) {
    RngStream rng(rep_seed, Stream::WalkA, 0);
    WalkState w = start_walk(t, wl.walk_origin, wc);
    std::vector<LoadEvent> events{{wl.walk_origin, LoadKind::WalkStep}};
    while (auto step = step_next(t, w, rng)) {
      if (step->visited) events.push_back({*step->visited, LoadKind::WalkStep});
    }
    fill_walk_columns(r, t, w, nullptr);
    fill_load_columns(r, events, t.size());
    return r;
  }

  Brokerage net(t, cfg.filters);

  if (cfg.workload.mode == RunMode::Cooperative) {
    RngStream sub_rng(rep_seed, Stream::WalkA, 0);
    RngStream pub_rng(rep_seed, Stream::WalkB, 0);
    const auto res = net.cooperative_publish_subscribe(
        wl.subscriptions[0], wl.notifications[0], wc, sub_rng, pub_rng);
    r.intersection_step = res.intersection_round;
    r.hops_to_match = res.outcome.hops_to_match;
    r.delivered = res.outcome.delivered;
    fill_walk_columns(r, t, res.subscriber_walk, &res.publisher_walk);
    fill_load_columns(r, net.load_log(), t.size());
    r.broker_count = net.broker_count();
    return r;
  }

  // Sequential: deploy everything, then publish everything.
  std::vector<WalkState> sub_walks;
  sub_walks.reserve(wl.subscriptions.size());
  for (std::uint32_t i = 0; i < wl.subscriptions.size(); ++i) {
    RngStream rng(rep_seed, Stream::WalkA, i);
    sub_walks.push_back(net.deploy_subscription(wl.subscriptions[i], wc, rng));
  }

  std::vector<DeliveryOutcome> outcomes;
  std::vector<WalkState> pub_walks;
  pub_walks.reserve(wl.notifications.size());
  for (std::uint32_t j = 0; j < wl.notifications.size(); ++j) {
    RngStream rng(rep_seed, Stream::WalkB, j);
    auto res = net.publish(wl.notifications[j], wc, rng, cfg.stop_on_first_match);
    pub_walks.push_back(std::move(res.walk));
    outcomes.insert(outcomes.end(), res.outcomes.begin(), res.outcomes.end());
  }

  // Delivered means every pair that matches exactly offline produced an
  // outcome; hops_to_match is the earliest match seen.
  bool all_delivered = true;
  for (const auto& sub : wl.subscriptions) {
    for (const auto& note : wl.notifications) {
      if (!exact_pair_match(sub, note)) continue;
      const bool got = std::any_of(outcomes.begin(), outcomes.end(), [&](const DeliveryOutcome& o) {
        return o.delivered && o.subscription_id == sub.id && o.notification_id == note.id;
      });
      if (!got) {
        all_delivered = false;
      }
    }
  }
  r.delivered = all_delivered;
  for (const auto& o : outcomes) {
    if (!o.delivered || !o.hops_to_match) continue;
    if (!r.hops_to_match || *o.hops_to_match < *r.hops_to_match) {
      r.hops_to_match = o.hops_to_match;
    }
  }

  if (wl.subscriptions.size() == 1 && wl.notifications.size() == 1) {
    const auto a = stamped_members(sub_walks[0]);
    const auto b = stamped_members(pub_walks[0]);
    r.intersection_step = intersection_step(a, b);
  }
  fill_walk_columns(r, t, sub_walks[0], &pub_walks[0]);
  fill_load_columns(r, net.load_log(), t.size());
  r.broker_count = net.broker_count();
  return r;
}

std::vector<MetricsRecord> run_replication(const ExperimentConfig& cfg,
                                           const Topology* shared_topology,
                                           std::uint32_t rep) {
  const std::uint64_t rep_seed = replication_seed(cfg.master_seed, rep);

  std::optional<Topology> generated;
  const Topology* t = shared_topology;
  if (t == nullptr) {
    generated = Topology::unit_disk(*cfg.topology.n, *cfg.topology.radius, rep_seed);
    t = &*generated;
  }

  const std::uint32_t principals =
      cfg.workload.mode == RunMode::WalkOnly
          ? 1
          : cfg.workload.publishers + cfg.workload.subscribers;
  if (principals > t->size()) {
    throw ConfigError("workload needs " + std::to_string(principals) +
                      " principals but the topology has " + std::to_string(t->size()) +
                      " nodes");
  }

  RngStream workload_rng(rep_seed, Stream::Workload);
  const RepWorkload wl = build_workload(*t, cfg.workload, workload_rng);

  std::vector<MetricsRecord> records;
  records.reserve(cfg.walk_variants.size());
  for (std::uint32_t v = 0; v < cfg.walk_variants.size(); ++v) {
    WalkConfig wc = cfg.walk_variants[v];
    if (wc.max_steps == 0) wc.max_steps = default_max_steps(t->size());
    records.push_back(run_variant(cfg, *t, rep_seed, wl, wc, v));
  }
  return records;
}

}  // namespace

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();

  std::optional<Topology> loaded;
  const Topology* shared = nullptr;
  if (!cfg.topology.edge_list_path.empty()) {
    const std::string edges = read_file(cfg.topology.edge_list_path);
    if (cfg.topology.positions_path.empty()) {
      loaded = Topology::from_edge_list(edges);
    } else {
      loaded = Topology::from_edge_list(edges, read_file(cfg.topology.positions_path));
    }
    shared = &*loaded;
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, cfg.replications);

  std::vector<std::vector<MetricsRecord>> per_rep(cfg.replications);

  if (threads <= 1) {
    for (std::uint32_t rep = 0; rep < cfg.replications; ++rep) {
      per_rep[rep] = run_replication(cfg, shared, rep);
    }
  } else {
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w]() {
        try {
          for (std::uint32_t rep = w; rep < cfg.replications; rep += threads) {
            per_rep[rep] = run_replication(cfg, shared, rep);
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& worker : workers) worker.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<MetricsRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.replications) * cfg.walk_variants.size());
  for (auto& rep_records : per_rep) {
    records.insert(records.end(), rep_records.begin(), rep_records.end());
  }
  std::sort(records.begin(), records.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
    if (a.seed != b.seed) return a.seed < b.seed;
    return a.variant_index < b.variant_index;
  });
  return records;
}

namespace {

void append_cell(std::string& out, const std::optional<std::uint32_t>& v) {
  if (v) out += std::to_string(*v);
}

void append_cell(std::string& out, const std::optional<double>& v) {
  if (v) out += format_double(*v);
}

void append_cell(std::string& out, const std::optional<bool>& v) {
  if (v) out += *v ? '1' : '0';
}

}  // namespace

std::string records_to_csv(std::span<const MetricsRecord> records) {
  std::string out = std::string("# drw-pubsub ") + kVersion + "\n";
  out +=
      "seed,n,radius,kind,branches,alpha,beta,penalty,ttl,cooperative,"
      "intersection_step,hops_to_match,delivered,path_hops_a,path_hops_b,"
      "euclid_a,euclid_b,nodes_used,max_load,gini,broker_count\n";
  for (const MetricsRecord& r : records) {
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    append_cell(out, r.radius);
    out += ',';
    out += to_string(r.kind);
    out += ',';
    out += std::to_string(r.branches);
    out += ',';
    out += format_double(r.alpha);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.penalty);
    out += ',';
    out += std::to_string(r.ttl);
    out += ',';
    append_cell(out, r.cooperative);
    out += ',';
    append_cell(out, r.intersection_step);
    out += ',';
    append_cell(out, r.hops_to_match);
    out += ',';
    append_cell(out, r.delivered);
    out += ',';
    append_cell(out, r.path_hops_a);
    out += ',';
    append_cell(out, r.path_hops_b);
    out += ',';
    append_cell(out, r.euclid_a);
    out += ',';
    append_cell(out, r.euclid_b);
    out += ',';
    out += std::to_string(r.nodes_used);
    out += ',';
    out += std::to_string(r.max_load);
    out += ',';
    out += format_double(r.gini);
    out += ',';
    append_cell(out, r.broker_count);
    out += '\n';
  }
  return out;
}

}  // namespace drwps
