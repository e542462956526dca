#include "drwps/brokerage.hpp"

#include <algorithm>
#include <string>

#include "drwps/errors.hpp"
#include "drwps/text.hpp"

namespace drwps {

void Subscription::validate() const {
  if (attributes.empty()) {
    throw ParameterError("subscription needs at least one attribute");
  }
  std::vector<std::string> names;
  names.reserve(attributes.size());
  for (const auto& [name, value] : attributes) names.push_back(to_lower(trim(name)));
  std::sort(names.begin(), names.end());
  const auto dup = std::adjacent_find(names.begin(), names.end());
  if (dup != names.end()) {
    throw ParameterError("duplicate attribute name in subscription: " + *dup);
  }
}

void Notification::validate() const {
  if (attributes.empty()) {
    throw ParameterError("notification needs at least one attribute");
  }
}

Brokerage::Brokerage(const Topology& t, FilterParams params)
    : topo_(&t), params_(params), tables_(t.size()), visitors_(t.size()) {
  // Rejects bad filter sizing up front rather than at first deploy.
  SubscriptionFilter probe(params_.bits, params_.hashes);
  (void)probe;
}

const BrokerTable& Brokerage::table(NodeId node) const {
  if (node >= tables_.size()) throw ParameterError("node id out of range");
  return tables_[node];
}

std::uint32_t Brokerage::broker_count() const {
  return static_cast<std::uint32_t>(
      std::count_if(tables_.begin(), tables_.end(),
                    [](const BrokerTable& bt) { return bt.is_broker; }));
}

void Brokerage::record_visit(NodeId node, const Principal& p) {
  auto& seen = visitors_[node];
  if (std::find(seen.begin(), seen.end(), p) != seen.end()) return;
  seen.push_back(p);
  if (seen.size() >= 2) tables_[node].is_broker = true;
}

namespace {

// Simulator-side registry of deployed subscription attributes, for exactness
// accounting. Nodes themselves only ever see the filter.
const std::vector<AttributePair>* find_attributes(
    const std::vector<std::pair<std::uint64_t, std::vector<AttributePair>>>& registry,
    std::uint64_t sub_id) {
  for (const auto& [id, attrs] : registry) {
    if (id == sub_id) return &attrs;
  }
  return nullptr;
}

bool contains_id(const std::vector<std::uint64_t>& ids, std::uint64_t id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

}  // namespace

void Brokerage::evaluate_at(NodeId node, const Notification& note, std::uint32_t hops,
                            std::vector<DeliveryOutcome>& out) {
  for (const StoredFilter& sf : tables_[node].subscription_filters) {
    note_load(node, LoadKind::MatchEval);
    const auto* sub_attrs = find_attributes(subscription_registry_, sf.subscription_id);
    static const std::vector<AttributePair> kNone;
    const MatchDecision d =
        match_decision(sf.filter, sub_attrs ? *sub_attrs : kNone, note.attributes);
    if (!d.filter_match) continue;

    const bool already = std::any_of(out.begin(), out.end(), [&](const DeliveryOutcome& o) {
      return o.subscription_id == sf.subscription_id && o.matched_at &&
             *o.matched_at == node;
    });
    if (already) continue;

    DeliveryOutcome o;
    o.notification_id = note.id;
    o.subscription_id = sf.subscription_id;
    o.matched_at = node;
    o.hops_to_match = hops;
    o.delivered = true;
    o.exact_match = d.exact_match;
    out.push_back(o);
    tables_[node].is_broker = true;
  }
}

WalkState Brokerage::deploy_subscription(const Subscription& sub, const WalkConfig& cfg,
                                         RngStream& rng) {
  sub.validate();
  if (find_attributes(subscription_registry_, sub.id) != nullptr) {
    throw ParameterError("subscription id " + std::to_string(sub.id) + " already deployed");
  }
  subscription_registry_.emplace_back(sub.id, sub.attributes);

  const std::uint64_t walk_id = next_walk_id_++;
  const Principal principal{Principal::Role::Subscriber, sub.subscriber};
  const SubscriptionFilter filter =
      make_subscription_filter(sub.attributes, params_.bits, params_.hashes);

  auto store_at = [&](NodeId node) {
    note_load(node, LoadKind::WalkStep);
    record_visit(node, principal);
    auto& filters = tables_[node].subscription_filters;
    const bool present = std::any_of(filters.begin(), filters.end(), [&](const StoredFilter& sf) {
      return sf.subscription_id == sub.id;
    });
    if (!present) {
      note_load(node, LoadKind::FilterStore);
      filters.push_back({sub.id, filter, walk_id});
    }
  };

  WalkState w = start_walk(*topo_, sub.subscriber, cfg);
  store_at(sub.subscriber);
  while (auto step = step_next(*topo_, w, rng)) {
    if (step->visited) store_at(*step->visited);
  }
  return w;
}

PublishResult Brokerage::publish(const Notification& note, const WalkConfig& cfg,
                                 RngStream& rng, bool stop_on_first_match) {
  note.validate();
  next_walk_id_++;
  const Principal principal{Principal::Role::Publisher, note.publisher};

  PublishResult result;
  auto visit = [&](NodeId node, std::uint32_t hops) {
    note_load(node, LoadKind::WalkStep);
    record_visit(node, principal);
    auto& stored = tables_[node].stored_notifications;
    if (!contains_id(stored, note.id)) stored.push_back(note.id);
    const std::size_t before = result.outcomes.size();
    evaluate_at(node, note, hops, result.outcomes);
    return result.outcomes.size() > before;
  };

  WalkState w = start_walk(*topo_, note.publisher, cfg);
  bool matched = visit(note.publisher, 0);
  if (!(stop_on_first_match && matched)) {
    while (auto step = step_next(*topo_, w, rng)) {
      if (step->visited && visit(*step->visited, w.total_steps) && stop_on_first_match) {
        break;
      }
    }
  }
  result.walk = std::move(w);
  return result;
}

CooperativeResult Brokerage::cooperative_publish_subscribe(const Subscription& sub,
                                                           const Notification& note,
                                                           const WalkConfig& cfg,
                                                           RngStream& subscriber_rng,
                                                           RngStream& publisher_rng) {
  sub.validate();
  note.validate();
  if (find_attributes(subscription_registry_, sub.id) != nullptr) {
    throw ParameterError("subscription id " + std::to_string(sub.id) + " already deployed");
  }
  subscription_registry_.emplace_back(sub.id, sub.attributes);

  const std::uint64_t sub_walk_id = next_walk_id_++;
  next_walk_id_++;  // publisher walk
  const Principal sub_principal{Principal::Role::Subscriber, sub.subscriber};
  const Principal pub_principal{Principal::Role::Publisher, note.publisher};
  const SubscriptionFilter filter =
      make_subscription_filter(sub.attributes, params_.bits, params_.hashes);

  auto sub_visit = [&](NodeId node) {
    note_load(node, LoadKind::WalkStep);
    record_visit(node, sub_principal);
    auto& filters = tables_[node].subscription_filters;
    const bool present = std::any_of(filters.begin(), filters.end(), [&](const StoredFilter& sf) {
      return sf.subscription_id == sub.id;
    });
    if (!present) {
      note_load(node, LoadKind::FilterStore);
      filters.push_back({sub.id, filter, sub_walk_id});
    }
  };
  auto pub_visit = [&](NodeId node) {
    note_load(node, LoadKind::WalkStep);
    record_visit(node, pub_principal);
    auto& stored = tables_[node].stored_notifications;
    if (!contains_id(stored, note.id)) stored.push_back(note.id);
  };

  CooperativeResult res;
  res.outcome.notification_id = note.id;
  res.outcome.subscription_id = sub.id;

  WalkState ws = start_walk(*topo_, sub.subscriber, cfg);
  WalkState wp = start_walk(*topo_, note.publisher, cfg);
  sub_visit(sub.subscriber);
  pub_visit(note.publisher);

  // The meeting node always holds the subscription's filter by the time it
  // is evaluated: either the publisher stepped onto a filtered node, or the
  // subscriber deposited one step earlier in this same round.
  auto meet = [&](NodeId node, std::uint32_t round) {
    note_load(node, LoadKind::MatchEval);
    const MatchDecision d = match_decision(filter, sub.attributes, note.attributes);
    res.intersection_round = round;
    res.meeting_node = node;
    if (d.filter_match) {
      res.outcome.delivered = true;
      res.outcome.exact_match = d.exact_match;
      res.outcome.matched_at = node;
      res.outcome.hops_to_match = round;
      tables_[node].is_broker = true;
    }
  };

  if (sub.subscriber == note.publisher) {
    meet(sub.subscriber, 0);
  } else {
    for (std::uint32_t round = 1; ws.any_active() || wp.any_active(); ++round) {
      const auto s = step_next(*topo_, ws, subscriber_rng);
      if (s && s->visited) {
        sub_visit(*s->visited);
        if (wp.is_member(*s->visited)) {
          meet(*s->visited, round);
          break;
        }
      }
      const auto p = step_next(*topo_, wp, publisher_rng);
      if (p && p->visited) {
        pub_visit(*p->visited);
        if (ws.is_member(*p->visited)) {
          meet(*p->visited, round);
          break;
        }
      }
    }
  }

  res.subscriber_walk = std::move(ws);
  res.publisher_walk = std::move(wp);
  return res;
}

DeliveryOutcome Brokerage::rumor_route(const Subscription& sub, const Notification& note,
                                       std::uint32_t agent_steps, std::uint32_t query_steps,
                                       bool infinite_memory, RngStream& agent_rng,
                                       RngStream& query_rng) {
  sub.validate();
  note.validate();

  WalkConfig wc;
  wc.kind = WalkKind::PureRandom;
  wc.branches = 1;
  wc.pure_unrestricted = !infinite_memory;

  auto deposit = [&](NodeId node) {
    note_load(node, LoadKind::WalkStep);
    auto& stored = tables_[node].stored_notifications;
    if (!contains_id(stored, note.id)) stored.push_back(note.id);
  };

  deposit(note.publisher);
  if (agent_steps > 0) {
    wc.max_steps = agent_steps;
    WalkState agent = start_walk(*topo_, note.publisher, wc);
    while (auto step = step_next(*topo_, agent, agent_rng)) {
      if (step->visited) deposit(*step->visited);
    }
  }

  DeliveryOutcome out;
  out.notification_id = note.id;
  out.subscription_id = sub.id;

  auto holds = [&](NodeId node) {
    note_load(node, LoadKind::WalkStep);
    note_load(node, LoadKind::MatchEval);
    return contains_id(tables_[node].stored_notifications, note.id);
  };

  if (holds(sub.subscriber)) {
    out.delivered = true;
    out.exact_match = true;
    out.matched_at = sub.subscriber;
    out.hops_to_match = 0;
    return out;
  }
  if (query_steps > 0) {
    wc.max_steps = query_steps;
    WalkState query = start_walk(*topo_, sub.subscriber, wc);
    while (auto step = step_next(*topo_, query, query_rng)) {
      if (step->visited && holds(*step->visited)) {
        out.delivered = true;
        out.exact_match = true;
        out.matched_at = *step->visited;
        out.hops_to_match = query.total_steps;
        break;
      }
    }
  }
  return out;
}

}  // namespace drwps
