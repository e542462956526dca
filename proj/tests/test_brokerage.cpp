#include "drwps/brokerage.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "drwps/errors.hpp"
#include "drwps/metrics.hpp"
#include "drwps/rng.hpp"
#include "drwps/topology.hpp"
#include "drwps/walks.hpp"

using namespace drwps;

namespace {

Topology make_path(std::uint32_t n) {
  std::string text;
  for (std::uint32_t i = 0; i + 1 < n; ++i) {
    text += std::to_string(i) + " " + std::to_string(i + 1) + "\n";
  }
  return Topology::from_edge_list(text);
}

Subscription make_sub(NodeId node, std::uint64_t id = 1) {
  return Subscription{node, {{"temp", "21"}, {"unit", "C"}}, id};
}

Notification make_note(NodeId node, std::uint64_t id = 100, bool matching = true) {
  if (matching) {
    return Notification{node, {{"temp", "21"}, {"unit", "C"}, {"site", "roof"}}, id};
  }
  return Notification{node, {{"temp", "30"}}, id};
}

WalkConfig single_branch(WalkKind kind, std::uint32_t ttl) {
  WalkConfig cfg;
  cfg.kind = kind;
  cfg.branches = 1;
  cfg.max_steps = ttl;
  return cfg;
}

std::set<NodeId> member_set(const WalkState& w) {
  return {w.members.begin(), w.members.end()};
}

std::uint64_t count_kind(std::span<const LoadEvent> log, LoadKind kind) {
  return static_cast<std::uint64_t>(
      std::count_if(log.begin(), log.end(), [&](const LoadEvent& e) { return e.kind == kind; }));
}

}  // namespace

TEST_CASE("subscription and notification validation") {
  CHECK_THROWS_AS((Subscription{0, {}, 1}.validate()), ParameterError);
  CHECK_THROWS_AS((Subscription{0, {{"Temp", "21"}, {"temp", "22"}}, 1}.validate()),
                  ParameterError);
  CHECK_NOTHROW(make_sub(0).validate());

  CHECK_THROWS_AS((Notification{0, {}, 1}.validate()), ParameterError);
  // Notifications may repeat names.
  CHECK_NOTHROW((Notification{0, {{"temp", "21"}, {"temp", "22"}}, 1}.validate()));
}

TEST_CASE("brokerage rejects invalid filter sizing up front") {
  const Topology t = make_path(3);
  CHECK_THROWS_AS((Brokerage(t, FilterParams{7, 3})), ParameterError);
  CHECK_THROWS_AS((Brokerage(t, FilterParams{64, 0})), ParameterError);
}

TEST_CASE("deploying from an isolated subscriber stores at one node") {
  const Topology t = Topology::unit_disk(1, 0.5, 1);
  Brokerage broker(t);
  RngStream rng(1);
  const WalkState w = broker.deploy_subscription(make_sub(0), single_branch(WalkKind::PureRandom, 5), rng);
  CHECK(w.members == std::vector<NodeId>{0});
  CHECK(broker.table(0).subscription_filters.size() == 1);
  CHECK(broker.table(0).subscription_filters[0].subscription_id == 1);
  CHECK(count_kind(broker.load_log(), LoadKind::WalkStep) == 1);
  CHECK(count_kind(broker.load_log(), LoadKind::FilterStore) == 1);
}

TEST_CASE("deploying along a path stores the filter at every path node") {
  const Topology t = make_path(5);
  Brokerage broker(t);
  RngStream rng(1);
  const WalkState w =
      broker.deploy_subscription(make_sub(0), single_branch(WalkKind::DrwWeighted, 10), rng);
  CHECK(w.members == std::vector<NodeId>{0, 1, 2, 3, 4});
  for (NodeId v = 0; v < 5; ++v) {
    REQUIRE(broker.table(v).subscription_filters.size() == 1);
    CHECK(broker.table(v).subscription_filters[0].subscription_id == 1);
    CHECK(broker.table(v).subscription_filters[0].walk_id ==
          broker.table(0).subscription_filters[0].walk_id);
    CHECK(!broker.table(v).is_broker);  // one principal only
  }
  CHECK(broker.broker_count() == 0);
}

TEST_CASE("stored-node set equals the walk's member set") {
  const Topology t = Topology::unit_disk(500, 0.09, 77);
  Brokerage broker(t);
  RngStream rng(42);
  WalkConfig cfg;  // default: two-branch marking walk
  cfg.max_steps = default_max_steps(t.size());
  const WalkState w = broker.deploy_subscription(make_sub(250, 9), cfg, rng);

  std::set<NodeId> stored;
  for (NodeId v = 0; v < t.size(); ++v) {
    if (!broker.table(v).subscription_filters.empty()) stored.insert(v);
  }
  CHECK(stored == member_set(w));
}

TEST_CASE("duplicate subscription ids are rejected") {
  const Topology t = make_path(4);
  Brokerage broker(t);
  RngStream rng(1);
  broker.deploy_subscription(make_sub(0, 5), single_branch(WalkKind::PureRandom, 3), rng);
  CHECK_THROWS_AS(
      broker.deploy_subscription(make_sub(2, 5), single_branch(WalkKind::PureRandom, 3), rng),
      ParameterError);
}

TEST_CASE("publishing at the subscriber's own node delivers at hop zero") {
  const Topology t = make_path(3);
  Brokerage broker(t);
  RngStream rng(1);
  broker.deploy_subscription(make_sub(1), single_branch(WalkKind::PureRandom, 4), rng);

  RngStream pub_rng(2);
  const PublishResult res =
      broker.publish(make_note(1), single_branch(WalkKind::PureRandom, 4), pub_rng, true);
  REQUIRE(!res.outcomes.empty());
  const DeliveryOutcome& o = res.outcomes.front();
  CHECK(o.delivered);
  CHECK(o.exact_match);
  CHECK(o.matched_at == NodeId{1});
  CHECK(o.hops_to_match == 0u);
  CHECK(o.notification_id == 100);
  CHECK(o.subscription_id == 1);
}

TEST_CASE("publisher starting on a filtered path matches at its first node") {
  const Topology t = make_path(3);
  Brokerage broker(t);
  RngStream rng(1);
  // Single-branch walk from 0 is forced along the whole path: filters at 0,1,2.
  broker.deploy_subscription(make_sub(0), single_branch(WalkKind::DrwMarking, 5), rng);

  RngStream pub_rng(2);
  const PublishResult res =
      broker.publish(make_note(2), single_branch(WalkKind::DrwMarking, 5), pub_rng);
  REQUIRE(!res.outcomes.empty());
  CHECK(res.outcomes.front().matched_at == NodeId{2});
  CHECK(res.outcomes.front().hops_to_match == 0u);
  // D13: without stop_on_first_match the walk keeps going and matches at
  // every filtered node it crosses.
  CHECK(res.outcomes.size() == 3);
  CHECK(res.walk.members == std::vector<NodeId>{2, 1, 0});

  // The notification id is stored at every visited node.
  for (NodeId v = 0; v < 3; ++v) {
    CHECK(broker.table(v).stored_notifications == std::vector<std::uint64_t>{100});
    CHECK(broker.table(v).is_broker);  // subscriber and publisher walks both pass
  }
  CHECK(broker.broker_count() == 3);
}

TEST_CASE("stop_on_first_match halts the publisher walk") {
  const Topology t = make_path(6);
  Brokerage broker(t);
  RngStream rng(1);
  broker.deploy_subscription(make_sub(0), single_branch(WalkKind::PureRandom, 10), rng);

  RngStream pub_rng(2);
  const PublishResult res =
      broker.publish(make_note(5), single_branch(WalkKind::PureRandom, 10), pub_rng, true);
  REQUIRE(res.outcomes.size() == 1);
  CHECK(res.outcomes.front().matched_at == NodeId{5});
  CHECK(res.walk.members == std::vector<NodeId>{5});  // halted at its origin
}

TEST_CASE("non-matching attributes are never delivered") {
  const Topology t = make_path(4);
  Brokerage broker(t);
  RngStream rng(1);
  broker.deploy_subscription(make_sub(0), single_branch(WalkKind::PureRandom, 6), rng);
  RngStream pub_rng(2);
  const PublishResult res = broker.publish(make_note(3, 101, /*matching=*/false),
                                           single_branch(WalkKind::PureRandom, 6), pub_rng);
  CHECK(res.outcomes.empty());
}

TEST_CASE("delivery equals the offline path-intersection predicate") {
  const Topology t = Topology::unit_disk(1000, 0.07, 4242);
  WalkConfig cfg;  // two-branch marking walk, the double-ruling default
  cfg.max_steps = default_max_steps(t.size());

  int delivered_runs = 0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Brokerage broker(t);
    RngStream pick(derive_seed(31337, {seed}));
    const auto sub_node = static_cast<NodeId>(pick.uniform_index(t.size()));
    const auto pub_node = static_cast<NodeId>(pick.uniform_index(t.size()));

    RngStream sub_rng(derive_seed(1, {seed}));
    RngStream pub_rng(derive_seed(2, {seed}));
    const WalkState ws = broker.deploy_subscription(make_sub(sub_node), cfg, sub_rng);
    const PublishResult res = broker.publish(make_note(pub_node), cfg, pub_rng);

    const std::set<NodeId> sub_nodes = member_set(ws);
    const std::set<NodeId> pub_nodes = member_set(res.walk);
    std::vector<NodeId> shared;
    std::set_intersection(sub_nodes.begin(), sub_nodes.end(), pub_nodes.begin(),
                          pub_nodes.end(), std::back_inserter(shared));

    const bool delivered = !res.outcomes.empty();
    CHECK(delivered == !shared.empty());
    if (delivered) {
      ++delivered_runs;
      // One outcome per shared node, each delivered at that node.
      CHECK(res.outcomes.size() == shared.size());
      // The first match happens at the publisher walk's earliest crossing.
      std::uint32_t earliest = UINT32_MAX;
      for (const StampedNode& s : stamped_members(res.walk)) {
        if (sub_nodes.count(s.node)) earliest = std::min(earliest, s.stamp);
      }
      CHECK(res.outcomes.front().hops_to_match == earliest);
      for (const DeliveryOutcome& o : res.outcomes) {
        CHECK(o.delivered);
        CHECK(o.exact_match);
        REQUIRE(o.matched_at.has_value());
        CHECK(sub_nodes.count(*o.matched_at) == 1);
        CHECK(pub_nodes.count(*o.matched_at) == 1);
      }
    }
  }
  CHECK(delivered_runs > 0);  // the regime is dense enough to cross sometimes
}

TEST_CASE("cooperative walks from one node meet at round zero") {
  const Topology t = make_path(3);
  Brokerage broker(t);
  WalkConfig cfg;
  cfg.max_steps = 5;
  RngStream ra(1);
  RngStream rb(2);
  const CooperativeResult res =
      broker.cooperative_publish_subscribe(make_sub(1), make_note(1), cfg, ra, rb);
  CHECK(res.intersection_round == 0u);
  CHECK(res.meeting_node == NodeId{1});
  CHECK(res.outcome.delivered);
  CHECK(res.outcome.exact_match);
  CHECK(res.outcome.hops_to_match == 0u);
  CHECK(broker.table(1).is_broker);
  CHECK(broker.broker_count() == 1);
}

TEST_CASE("cooperative walks in separate components never meet") {
  const Topology t = Topology::from_edge_list("0 1\n2 3");
  Brokerage broker(t);
  WalkConfig cfg;
  cfg.max_steps = 50;
  RngStream ra(1);
  RngStream rb(2);
  const CooperativeResult res =
      broker.cooperative_publish_subscribe(make_sub(0), make_note(2), cfg, ra, rb);
  CHECK(!res.intersection_round.has_value());
  CHECK(!res.meeting_node.has_value());
  CHECK(!res.outcome.delivered);
  CHECK(broker.broker_count() == 0);
  CHECK(!res.subscriber_walk.any_active());
  CHECK(!res.publisher_walk.any_active());
}

TEST_CASE("cooperative round equals the offline intersection step") {
  const Topology t = Topology::unit_disk(600, 0.09, 555);
  WalkConfig cfg;
  cfg.max_steps = default_max_steps(t.size());

  int met = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Brokerage broker(t);
    RngStream pick(derive_seed(99, {seed}));
    const auto a = static_cast<NodeId>(pick.uniform_index(t.size()));
    const auto b = static_cast<NodeId>(pick.uniform_index(t.size()));
    RngStream ra(derive_seed(3, {seed}));
    RngStream rb(derive_seed(4, {seed}));
    const CooperativeResult res =
        broker.cooperative_publish_subscribe(make_sub(a), make_note(b), cfg, ra, rb);

    const auto offline = intersection_step(stamped_members(res.subscriber_walk),
                                           stamped_members(res.publisher_walk));
    CHECK(res.intersection_round == offline);

    std::set<NodeId> sn = member_set(res.subscriber_walk);
    std::set<NodeId> pn = member_set(res.publisher_walk);
    std::vector<NodeId> shared;
    std::set_intersection(sn.begin(), sn.end(), pn.begin(), pn.end(),
                          std::back_inserter(shared));
    if (res.intersection_round) {
      ++met;
      if (a != b) {
        // Lockstep detection halts at the moment of first overlap, so the
        // final paths share exactly the meeting node.
        CHECK(shared.size() == 1);
        CHECK(shared.front() == *res.meeting_node);
      }
      CHECK(res.outcome.delivered);  // attributes match in this workload
      CHECK(broker.broker_count() == 1);
    } else {
      CHECK(shared.empty());
      CHECK(!res.outcome.delivered);
    }
  }
  CHECK(met > 0);
}

TEST_CASE("two subscriptions from one principal make no brokers") {
  const Topology t = make_path(4);
  Brokerage broker(t);
  RngStream rng(1);
  broker.deploy_subscription(make_sub(0, 1), single_branch(WalkKind::PureRandom, 6), rng);
  broker.deploy_subscription(Subscription{0, {{"hum", "40"}}, 2},
                             single_branch(WalkKind::PureRandom, 6), rng);
  CHECK(broker.broker_count() == 0);  // same (role, node) principal both times
  CHECK(broker.table(0).subscription_filters.size() == 2);
}

TEST_CASE("brokers lie on at least two distinct principals' paths") {
  const Topology t = Topology::unit_disk(400, 0.1, 9);
  Brokerage broker(t);
  WalkConfig cfg;
  cfg.max_steps = 60;
  RngStream r1(11);
  RngStream r2(12);
  RngStream r3(13);
  const WalkState w1 = broker.deploy_subscription(make_sub(10, 1), cfg, r1);
  const WalkState w2 = broker.deploy_subscription(make_sub(300, 2), cfg, r2);
  const PublishResult pr = broker.publish(make_note(200), cfg, r3);

  const std::set<NodeId> s1 = member_set(w1);
  const std::set<NodeId> s2 = member_set(w2);
  const std::set<NodeId> s3 = member_set(pr.walk);
  std::uint32_t flagged = 0;
  for (NodeId v = 0; v < t.size(); ++v) {
    if (!broker.table(v).is_broker) continue;
    ++flagged;
    const int on = (s1.count(v) ? 1 : 0) + (s2.count(v) ? 1 : 0) + (s3.count(v) ? 1 : 0);
    CHECK(on >= 2);
  }
  CHECK(broker.broker_count() == flagged);
}

TEST_CASE("load accounting on a fully deterministic path scenario") {
  const Topology t = make_path(3);
  Brokerage broker(t);
  RngStream rng(1);
  // Deploy covers 0,1,2: three walk steps, three filter stores.
  broker.deploy_subscription(make_sub(0), single_branch(WalkKind::DrwWeighted, 5), rng);
  // Publish from 2 crosses 2,1,0: three walk steps, one evaluation per node.
  RngStream pub_rng(2);
  const PublishResult res =
      broker.publish(make_note(2), single_branch(WalkKind::DrwWeighted, 5), pub_rng);
  CHECK(res.outcomes.size() == 3);

  CHECK(count_kind(broker.load_log(), LoadKind::WalkStep) == 6);
  CHECK(count_kind(broker.load_log(), LoadKind::FilterStore) == 3);
  CHECK(count_kind(broker.load_log(), LoadKind::MatchEval) == 3);

  const LoadProfile profile = load_profile(broker.load_log(), t.size());
  CHECK(profile.nodes_used == 3);
  CHECK(profile.per_node_load == std::vector<std::uint64_t>{4, 4, 4});
  CHECK(profile.gini == 0.0);
}

TEST_CASE("rumor routing delivers at hop zero when the query starts on a deposit") {
  const Topology t = make_path(4);
  Brokerage broker(t);
  RngStream ra(1);
  RngStream rq(2);
  // agent_steps = 0: the id sits only at the publisher. Subscriber == publisher.
  const DeliveryOutcome o =
      broker.rumor_route(make_sub(2), make_note(2), 0, 5, true, ra, rq);
  CHECK(o.delivered);
  CHECK(o.matched_at == NodeId{2});
  CHECK(o.hops_to_match == 0u);
}

TEST_CASE("rumor routing fails without steps or overlap") {
  const Topology t = make_path(4);
  Brokerage broker(t);
  RngStream ra(1);
  RngStream rq(2);
  const DeliveryOutcome o =
      broker.rumor_route(make_sub(3), make_note(0), 0, 0, true, ra, rq);
  CHECK(!o.delivered);
  CHECK(!o.matched_at.has_value());
  CHECK(!o.hops_to_match.has_value());
}

TEST_CASE("rumor routing reports query hops and leaves broker state untouched") {
  const Topology t = make_path(6);
  Brokerage broker(t);
  RngStream ra(1);
  RngStream rq(2);
  // Self-avoiding agent from 0 with 3 steps deposits at 0,1,2,3; query from 5
  // is forced leftward and first holds the id at node 3, two hops out.
  const DeliveryOutcome o =
      broker.rumor_route(make_sub(5), make_note(0), 3, 5, true, ra, rq);
  CHECK(o.delivered);
  CHECK(o.exact_match);
  CHECK(o.matched_at == NodeId{3});
  CHECK(o.hops_to_match == 2u);

  CHECK(broker.broker_count() == 0);
  for (NodeId v = 0; v < t.size(); ++v) {
    CHECK(broker.table(v).subscription_filters.empty());
  }
  for (NodeId v = 0; v <= 3; ++v) {
    CHECK(broker.table(v).stored_notifications == std::vector<std::uint64_t>{100});
  }
  CHECK(count_kind(broker.load_log(), LoadKind::FilterStore) == 0);
  // Deposits: 4 walk steps. Query: origin check (1) plus two steps, each a
  // walk step paired with one lookup evaluation.
  CHECK(count_kind(broker.load_log(), LoadKind::WalkStep) == 7);
  CHECK(count_kind(broker.load_log(), LoadKind::MatchEval) == 3);
}

TEST_CASE("memoryless rumor walks can revisit nodes") {
  const Topology t = make_path(3);
  Brokerage broker(t);
  RngStream ra(7);
  RngStream rq(8);
  // With infinite_memory=false the 20-step agent walk bounces; every visit
  // logs load, so the log exceeds the node count. 21 agent deposits plus the
  // query origin check.
  broker.rumor_route(make_sub(2), make_note(0), 20, 0, false, ra, rq);
  CHECK(count_kind(broker.load_log(), LoadKind::WalkStep) == 22);
}

TEST_CASE("table access is range checked") {
  const Topology t = make_path(3);
  const Brokerage broker(t);
  CHECK_THROWS_AS(broker.table(7), ParameterError);
}
