#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drwps/filters.hpp"
#include "drwps/metrics.hpp"
#include "drwps/rng.hpp"
#include "drwps/topology.hpp"
#include "drwps/walks.hpp"

namespace drwps {

// A standing interest registered at a node. Attribute names must be unique
// after canonicalization (one value per attribute); the list must be
// nonempty.
struct Subscription {
  NodeId subscriber = 0;
  std::vector<AttributePair> attributes;
  std::uint64_t id = 0;

  void validate() const;  // throws ParameterError
};

// A published message. Attributes nonempty; duplicate names are allowed, a
// notification simply carries its pairs.
struct Notification {
  NodeId publisher = 0;
  std::vector<AttributePair> attributes;
  std::uint64_t id = 0;

  void validate() const;  // throws ParameterError
};

struct StoredFilter {
  std::uint64_t subscription_id = 0;
  SubscriptionFilter filter;
  std::uint64_t walk_id = 0;  // the subscriber walk that deposited it
};

// Per-node brokerage state. Holds subscription filters and opaque
// notification ids only; publisher identities and publication predicates are
// never indexed here. The broker flag flips the first time walks from two
// distinct principals both include the node.
struct BrokerTable {
  std::vector<StoredFilter> subscription_filters;
  std::vector<std::uint64_t> stored_notifications;
  bool is_broker = false;
};

// Delivery result for one (notification, subscription) pair at one node.
// delivered follows the filter decision a node can actually make;
// exact_match records the ground-truth conjunction for false-positive
// accounting.
struct DeliveryOutcome {
  std::uint64_t notification_id = 0;
  std::uint64_t subscription_id = 0;
  std::optional<NodeId> matched_at;
  std::optional<std::uint32_t> hops_to_match;
  bool delivered = false;
  bool exact_match = false;
};

// A walk-launching actor: the role distinguishes a subscriber and a
// publisher stationed at the same node.
struct Principal {
  enum class Role : std::uint8_t { Subscriber, Publisher };
  Role role = Role::Subscriber;
  NodeId node = 0;

  friend bool operator==(const Principal&, const Principal&) = default;
};

struct FilterParams {
  std::uint32_t bits = SubscriptionFilter::kDefaultBits;
  std::uint32_t hashes = SubscriptionFilter::kDefaultHashes;
};

struct PublishResult {
  WalkState walk;
  // One outcome per (subscription, node) whose stored filter matched;
  // delivered is true in all of them. Misses are the harness's business.
  std::vector<DeliveryOutcome> outcomes;
};

struct CooperativeResult {
  // Lockstep round at which the two walks first shared a node; empty when
  // both walks died first.
  std::optional<std::uint32_t> intersection_round;
  std::optional<NodeId> meeting_node;
  DeliveryOutcome outcome;
  WalkState subscriber_walk;
  WalkState publisher_walk;
};

// One simulation run's brokerage layer: the per-node tables, the load event
// log, and walk bookkeeping. Owns its state exclusively; independent runs
// use independent instances. The referenced topology must outlive the
// instance.
//
// Load accounting: every node a walk steps through costs one WalkStep
// (origins included, revisits too), every filter deposit one FilterStore,
// and every filter-vs-notification evaluation one MatchEval.
class Brokerage {
 public:
  explicit Brokerage(const Topology& t, FilterParams params = {});

  // Runs a walk of cfg.kind from the subscriber to exhaustion/TTL and stores
  // the subscription's filter at every path node. Deploying the same
  // subscription id twice is a ParameterError.
  WalkState deploy_subscription(const Subscription& sub, const WalkConfig& cfg,
                                RngStream& rng);

  // Advances a walk from the publisher; at each visited node every stored
  // filter is evaluated against the notification, matches become outcomes
  // (first hit per (subscription, node) kept), and the notification id is
  // recorded at the node. With stop_on_first_match the walk halts on the
  // first matching node, otherwise it continues to TTL.
  PublishResult publish(const Notification& note, const WalkConfig& cfg, RngStream& rng,
                        bool stop_on_first_match = false);

  // Lockstep mode: both walks advance one branch-step per round, and the
  // round at which their node sets first overlap is returned along with the
  // match decision evaluated at the meeting node. Separate RNG streams keep
  // the two walks' draws independent; passing the same stream twice is
  // allowed.
  CooperativeResult cooperative_publish_subscribe(const Subscription& sub,
                                                  const Notification& note,
                                                  const WalkConfig& cfg,
                                                  RngStream& subscriber_rng,
                                                  RngStream& publisher_rng);

  // Rumor-routing baseline: an event agent walks agent_steps from the
  // publisher depositing the notification id, then a query walks query_steps
  // from the subscriber and succeeds on reaching any deposit.
  // infinite_memory makes both walks self-avoiding, otherwise they are
  // memoryless. Runs outside broker accounting: no filters, no broker
  // flags, only WalkStep/MatchEval load events.
  DeliveryOutcome rumor_route(const Subscription& sub, const Notification& note,
                              std::uint32_t agent_steps, std::uint32_t query_steps,
                              bool infinite_memory, RngStream& agent_rng,
                              RngStream& query_rng);

  const Topology& topology() const { return *topo_; }
  const BrokerTable& table(NodeId node) const;
  std::span<const LoadEvent> load_log() const { return load_log_; }
  std::uint32_t broker_count() const;

 private:
  // Registers that principal p's walk includes node; flips the broker flag
  // when a second distinct principal arrives. Kept outside BrokerTable so
  // tables stay free of principal identities.
  void record_visit(NodeId node, const Principal& p);

  void note_load(NodeId node, LoadKind kind) { load_log_.push_back({node, kind}); }

  // Evaluates all filters stored at node against note, appending match
  // outcomes to out (at hops steps into the publisher walk).
  void evaluate_at(NodeId node, const Notification& note, std::uint32_t hops,
                   std::vector<DeliveryOutcome>& out);

  const Topology* topo_;
  FilterParams params_;
  std::vector<BrokerTable> tables_;
  std::vector<std::vector<Principal>> visitors_;  // parallel to tables_
  std::vector<LoadEvent> load_log_;
  // Deployed subscriptions by id, simulator-side, for duplicate detection
  // and exactness accounting. Node tables never see these attributes.
  std::vector<std::pair<std::uint64_t, std::vector<AttributePair>>> subscription_registry_;
  std::uint64_t next_walk_id_ = 0;
};

}  // namespace drwps
