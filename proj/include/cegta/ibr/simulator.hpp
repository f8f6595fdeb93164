#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "cegta/ibr/config.hpp"
#include "cegta/ibr/topology.hpp"
#include "cegta/rng.hpp"

namespace cegta::ibr {

struct NodeStats {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t received_legit = 0;
  std::uint64_t attacks_suffered = 0;
  std::uint64_t attacks_succeeded_against = 0;
  std::uint64_t intros_performed = 0;
  std::uint64_t intros_refused = 0;
  std::uint64_t introduced_traffic = 0;
  std::uint64_t introduced_attacks = 0;
  std::uint64_t connections_made = 0;
  std::uint64_t connections_terminated = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t reports_sent = 0;
  std::uint64_t reports_received = 0;
  double conn_time = 0.0;
};

struct Aggregates {
  std::uint64_t messages_generated = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t attacks_attempted = 0;
  std::uint64_t attacks_detected = 0;
  std::uint64_t attacks_undetected = 0;
  std::uint64_t attacks_succeeded = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_reports = 0;
  std::uint64_t connections_terminated = 0;
  std::uint64_t events = 0;
};

struct SimResult {
  /// One entry per honest node (roots, ISPs, clients, servers).
  std::vector<double> payoff;
  /// One entry per node, attackers included.
  std::vector<NodeStats> stats;
  Aggregates agg;
  /// Introducer-chain lengths of endpoint connections, index = length.
  std::array<std::uint64_t, 5> chain_lengths{};
  std::uint64_t trace_hash = 0;
  /// Filled only when invariant checking is on.
  std::vector<std::string> violations;
  Topology topology;

  /// Mean messages generated per client.
  double messages_per_client() const {
    const int n = topology.count_of(NodeKind::client);
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(stats[static_cast<std::size_t>(topology.client_begin + i)].generated);
    return sum / n;
  }
};

struct SimOptions {
  PayoffWeights weights;
  bool verify_invariants = false;
};

inline double node_payoff(const NodeStats& s, const PayoffWeights& w) {
  return w.v_msg * static_cast<double>(s.delivered) + w.v_recv * static_cast<double>(s.received_legit) -
         w.p_attack * static_cast<double>(s.attacks_succeeded_against) - w.c_conn * s.conn_time -
         w.c_intro * static_cast<double>(s.intros_performed) + w.v_fee * static_cast<double>(s.introduced_traffic) -
         w.p_liability * static_cast<double>(s.introduced_attacks);
}

namespace detail {

constexpr int kMaxChain = 4;

struct Conn {
  bool apriori = false;
  int initiator = -1;
  std::array<int, kMaxChain> chain{};  // newest introducer first
  std::uint8_t len = 0;
  bool acked = false;
  std::int64_t since = 0;
};

struct Rep {
  double value = 0.0;
  std::int64_t t = 0;
};

enum class Ev : std::uint8_t { activate, arrive, reply, report };

struct Event {
  std::int64_t time;
  int node;
  std::uint64_t seq;
  Ev type;
  bool flag = false;
  int other = -1;
  double strength = 0.0;
  std::array<int, kMaxChain> chain{};
  std::uint8_t len = 0;
  std::uint8_t pos = 0;
  bool forward = true;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.node != b.node) return a.node > b.node;
    return a.seq > b.seq;
  }
};

class Engine {
 public:
  Engine(const NetworkConfig& cfg, const std::vector<PolicyParams>& policies, std::uint64_t seed,
         const SimOptions& opt)
      : cfg_(cfg), opt_(opt), policy_(policies) {
    cfg_.validate();
    res_.trace_hash = 1469598103934665603ULL;
    res_.topology = build_topology(cfg_, seed);
    const auto& topo = res_.topology;
    if (policy_.size() != static_cast<std::size_t>(cfg_.n_honest()))
      throw ConfigError("expected " + std::to_string(cfg_.n_honest()) + " node policies, got " +
                        std::to_string(policy_.size()));
    const std::size_t n = topo.size();
    res_.stats.resize(n);
    conns_.resize(n);
    reps_.resize(n);
    rng_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rng_.emplace_back(mix_seed(seed, 1, i));
    decay_ = std::log(2.0) / cfg_.reputation_half_life;
    for (std::size_t a = 0; a < n; ++a)
      for (int b : topo.adjacent[a]) {
        Conn c;
        c.apriori = true;
        conns_[a].emplace(b, c);
      }
  }

  SimResult run() {
    const auto& topo = res_.topology;
    for (int i = 0; i < topo.n_nodes; ++i) {
      const auto k = topo.kind[static_cast<std::size_t>(i)];
      if (k == NodeKind::client || k == NodeKind::rep_attacker) push(Ev::activate, i, uniform(i, cfg_.sleep_max));
      if (k == NodeKind::attacker) push(Ev::activate, i, uniform(i, cfg_.attacker_sleep_max));
    }
    while (!queue_.empty() && queue_.top().time < cfg_.horizon) {
      const Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      ++res_.agg.events;
      trace(ev);
      switch (ev.type) {
        case Ev::activate: activate(ev.node); break;
        case Ev::arrive: arrive(ev); break;
        case Ev::reply: reply(ev); break;
        case Ev::report: report(ev); break;
      }
      if (opt_.verify_invariants) check_symmetry();
    }
    now_ = cfg_.horizon;
    for (std::size_t a = 0; a < conns_.size(); ++a)
      for (const auto& [b, c] : conns_[a])
        if (!c.apriori) res_.stats[a].conn_time += static_cast<double>(cfg_.horizon - std::min(c.since, cfg_.horizon));
    res_.payoff.resize(static_cast<std::size_t>(cfg_.n_honest()));
    for (std::size_t i = 0; i < res_.payoff.size(); ++i) res_.payoff[i] = node_payoff(res_.stats[i], opt_.weights);
    const auto& a = res_.agg;
    for (auto v : {a.messages_generated, a.messages_delivered, a.attacks_attempted, a.attacks_detected,
                   a.attacks_succeeded, a.false_positives, a.false_reports, a.connections_terminated})
      res_.trace_hash = fnv1a(&v, sizeof v, res_.trace_hash);
    return std::move(res_);
  }

 private:
  const PolicyParams& pol(int node) const { return policy_[static_cast<std::size_t>(node)]; }
  NodeKind kind(int node) const { return res_.topology.kind[static_cast<std::size_t>(node)]; }
  NodeStats& st(int node) { return res_.stats[static_cast<std::size_t>(node)]; }
  std::mt19937_64& rng(int node) { return rng_[static_cast<std::size_t>(node)]; }

  std::int64_t uniform(int node, int max) {
    return std::uniform_int_distribution<std::int64_t>(0, max)(rng(node));
  }
  bool chance(int node, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng(node)) < p; }

  void push(Ev type, int node, std::int64_t time, Event e = {}) {
    e.time = time;
    e.node = node;
    e.seq = seq_++;
    e.type = type;
    queue_.push(e);
  }

  void trace(const Event& e) {
    const std::int64_t words[4] = {e.time, e.node, static_cast<std::int64_t>(e.type) * 2 + (e.flag ? 1 : 0),
                                   e.other};
    res_.trace_hash = fnv1a(words, sizeof words, res_.trace_hash);
  }

  // reputations ---------------------------------------------------------
  double rep(int holder, int about) {
    auto& m = reps_[static_cast<std::size_t>(holder)];
    auto it = m.find(about);
    if (it == m.end()) return 0.0;
    return it->second.value * std::exp(-decay_ * static_cast<double>(now_ - it->second.t));
  }
  void adjust(int holder, int about, double delta) {
    if (delta == 0.0) return;
    const double v = std::clamp(rep(holder, about) + delta, -1.0, 1.0);
    reps_[static_cast<std::size_t>(holder)][about] = Rep{v, now_};
    if (opt_.verify_invariants && (v < -1.0 || v > 1.0)) violation("reputation out of bounds");
  }

  // connections ----------------------------------------------------------
  Conn* conn(int a, int b) {
    auto& m = conns_[static_cast<std::size_t>(a)];
    auto it = m.find(b);
    return it == m.end() ? nullptr : &it->second;
  }

  void connect(int x, int w, int introducer, std::int64_t when) {
    Conn c;
    c.initiator = x;
    c.since = when;
    c.chain[0] = introducer;
    c.len = 1;
    if (const Conn* via = conn(x, introducer); via && !via->apriori) {
      for (int i = 0; i < via->len && c.len < kMaxChain; ++i) c.chain[c.len++] = via->chain[static_cast<std::size_t>(i)];
      if (via->len + 1 > kMaxChain) violation("introduction chain longer than " + std::to_string(kMaxChain));
    }
    conns_[static_cast<std::size_t>(x)][w] = c;
    conns_[static_cast<std::size_t>(w)][x] = c;
    ++st(x).connections_made;
    ++st(w).connections_made;
  }

  void terminate(int a, int b) {
    Conn* c = conn(a, b);
    if (!c || c->apriori) return;
    const double held = static_cast<double>(now_ - std::min(c->since, now_));
    st(a).conn_time += held;
    st(b).conn_time += held;
    ++st(a).connections_terminated;
    ++st(b).connections_terminated;
    ++res_.agg.connections_terminated;
    conns_[static_cast<std::size_t>(a)].erase(b);
    conns_[static_cast<std::size_t>(b)].erase(a);
  }

  /// Introduction path from x to y through the a priori tree.
  std::vector<int> path(int x, int y) const {
    const auto& t = res_.topology;
    const int i1 = t.isp_of[static_cast<std::size_t>(x)];
    const int i2 = t.isp_of[static_cast<std::size_t>(y)];
    if (i1 == i2) return {x, i1, y};
    const auto [a1, b1] = t.roots_of_isp(i1);
    const auto [a2, b2] = t.roots_of_isp(i2);
    int shared = -1;
    for (int r : {a1, b1})
      if (r == a2 || r == b2) shared = shared < 0 ? r : std::min(shared, r);
    if (shared >= 0) return {x, i1, shared, i2, y};
    return {x, i1, a1, a2, i2, y};
  }

  /// Make sure x holds a connection to y, walking introductions as needed.
  /// Returns whether it succeeded and the time it became usable.
  std::pair<bool, std::int64_t> ensure_connection(int x, int y) {
    if (conn(x, y)) return {true, now_};
    const auto p = path(x, y);
    std::size_t start = 1;
    for (std::size_t j = p.size() - 1; j >= 1; --j)
      if (conn(x, p[j])) {
        start = j;
        break;
      }
    std::int64_t t = now_;
    for (std::size_t k = start; k + 1 < p.size(); ++k) {
      const int z = p[k];
      const int w = p[k + 1];
      t += cfg_.intro_latency;
      if (conn(x, w)) continue;
      const auto& pz = pol(z);
      const bool make = rep(z, x) >= pz.intro_make_threshold && rep(z, w) >= pz.intro_make_threshold;
      bool accept = false;
      if (make) {
        const auto& pw = pol(w);
        accept = rep(w, z) >= pw.intro_accept_threshold && rep(w, x) >= pw.intro_accept_threshold;
      }
      if (!make || !accept) {
        ++st(make ? w : z).intros_refused;
        return {false, t};
      }
      ++st(z).intros_performed;
      connect(x, w, z, t);
      if (w == y) {
        const Conn* c = conn(x, y);
        ++res_.chain_lengths[std::min<std::size_t>(c->len, 4)];
        if (opt_.verify_invariants && (c->len < 1 || c->len > 4)) violation("endpoint chain length out of range");
      }
    }
    return {true, t};
  }

  // behavior -------------------------------------------------------------
  void activate(int x) {
    const auto& topo = res_.topology;
    const auto k = kind(x);
    if (k == NodeKind::client) {
      const int y = topo.server_begin + static_cast<int>(uniform(x, topo.count_of(NodeKind::server) - 1));
      ++st(x).generated;
      ++res_.agg.messages_generated;
      const auto [ok, t] = ensure_connection(x, y);
      if (!ok) {
        push(Ev::activate, x, std::max(now_ + 1, t + uniform(x, cfg_.sleep_max)));
        return;
      }
      Event e;
      e.other = x;
      push(Ev::arrive, y, t + cfg_.transit, e);
      return;
    }
    const int target = topo.target[static_cast<std::size_t>(x)];
    if (k == NodeKind::attacker) {
      ++st(x).generated;
      const auto [ok, t] = ensure_connection(x, target);
      if (ok) {
        Event e;
        e.other = x;
        e.flag = chance(x, cfg_.prob.attack);
        push(Ev::arrive, target, t + cfg_.transit, e);
      }
      push(Ev::activate, x, std::max(now_ + 1, t + uniform(x, cfg_.attacker_sleep_max)));
      return;
    }
    if (k == NodeKind::rep_attacker) {
      const auto [ok, t] = ensure_connection(x, target);
      if (ok && chance(x, cfg_.false_report_prob)) {
        const Conn* c = conn(x, target);
        if (c && c->len > 0) {
          ++res_.agg.false_reports;
          ++st(x).reports_sent;
          send_report(x, target, *c, 1.0, t);
        }
      }
      push(Ev::activate, x, std::max(now_ + 1, t + uniform(x, cfg_.sleep_max)));
    }
  }

  /// Report about `accused` along c's chain, starting at the introducer
  /// nearest to `reporter`.
  void send_report(int reporter, int accused, const Conn& c, double strength, std::int64_t t) {
    Event e;
    e.other = accused;
    e.strength = strength;
    e.chain = c.chain;
    e.len = c.len;
    e.forward = reporter != c.initiator;
    e.pos = e.forward ? 0 : static_cast<std::uint8_t>(c.len - 1);
    push(Ev::report, c.chain[e.pos], t + cfg_.report_latency, e);
  }

  void negative(int target, int accused) {
    const auto& p = pol(target);
    adjust(target, accused, -p.rep_decrement_negative);
    const Conn* c = conn(target, accused);
    if (!c || c->apriori) return;
    if (p.report_propagation_weight > 0 && c->len > 0) {
      ++st(target).reports_sent;
      send_report(target, accused, *c, p.report_propagation_weight, now_);
    }
    if (rep(target, accused) < p.connection_terminate_threshold) terminate(target, accused);
  }

  void credit_chain(const Conn& c, bool attack) {
    for (int i = 0; i < c.len; ++i) {
      auto& s = st(c.chain[static_cast<std::size_t>(i)]);
      if (attack) ++s.introduced_attacks;
      else ++s.introduced_traffic;
    }
  }

  void arrive(const Event& ev) {
    const int y = ev.node;
    const int x = ev.other;
    const bool from_client = kind(x) == NodeKind::client;
    Conn* c = conn(x, y);
    if (!c) {
      if (from_client) push_reply(x, y, false);
      return;
    }
    if (ev.flag) {
      auto& a = res_.agg;
      ++a.attacks_attempted;
      ++st(y).attacks_suffered;
      credit_chain(*c, true);
      if (chance(y, cfg_.prob.detect)) {
        ++a.attacks_detected;
        negative(y, x);
      } else {
        ++a.attacks_undetected;
        if (chance(y, cfg_.prob.success_undetected)) {
          ++a.attacks_succeeded;
          ++st(y).attacks_succeeded_against;
        }
      }
      return;
    }
    if (chance(y, cfg_.prob.false_positive)) {
      ++res_.agg.false_positives;
      ++st(y).false_positives;
      negative(y, x);
      if (from_client) push_reply(x, y, false);
      return;
    }
    ++st(x).delivered;
    ++st(y).received_legit;
    ++res_.agg.messages_delivered;
    credit_chain(*c, false);
    adjust(y, x, pol(y).rep_increment_positive);
    if (!c->apriori && !c->acked && c->len > 0) {
      c->acked = true;
      if (Conn* back = conn(y, x)) back->acked = true;
      const int z = c->chain[0];
      adjust(z, x, pol(z).rep_increment_positive);
    }
    if (from_client) push_reply(x, y, true);
  }

  void push_reply(int x, int y, bool delivered) {
    Event e;
    e.other = y;
    e.flag = delivered;
    push(Ev::reply, x, now_ + cfg_.transit, e);
  }

  void reply(const Event& ev) {
    const int x = ev.node;
    if (ev.flag) adjust(x, ev.other, pol(x).rep_increment_positive);
    push(Ev::activate, x, std::max(now_ + 1, now_ + uniform(x, cfg_.sleep_max)));
  }

  void report(const Event& ev) {
    const int z = ev.node;
    const int accused = ev.other;
    const auto& p = pol(z);
    ++st(z).reports_received;
    adjust(z, accused, -p.rep_decrement_report * ev.strength);
    if (Conn* c = conn(z, accused); c && !c->apriori && rep(z, accused) < p.connection_terminate_threshold)
      terminate(z, accused);
    const int next = ev.forward ? ev.pos + 1 : ev.pos - 1;
    const double s = ev.strength * p.report_propagation_weight;
    if (next < 0 || next >= ev.len || s <= 1e-9) return;
    Event e = ev;
    e.strength = s;
    e.pos = static_cast<std::uint8_t>(next);
    push(Ev::report, ev.chain[static_cast<std::size_t>(next)], now_ + cfg_.report_latency, e);
  }

  void check_symmetry() {
    for (std::size_t a = 0; a < conns_.size(); ++a)
      for (const auto& [b, c] : conns_[a])
        if (!conn(b, static_cast<int>(a))) {
          violation("asymmetric connection " + std::to_string(a) + "-" + std::to_string(b));
          return;
        }
  }

  void violation(const std::string& what) {
    if (res_.violations.size() < 16) res_.violations.push_back("t=" + std::to_string(now_) + ": " + what);
  }

  NetworkConfig cfg_;
  SimOptions opt_;
  const std::vector<PolicyParams>& policy_;
  SimResult res_;
  std::vector<std::unordered_map<int, Conn>> conns_;
  std::vector<std::unordered_map<int, Rep>> reps_;
  std::vector<std::mt19937_64> rng_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::int64_t now_ = 0;
  double decay_ = 0.0;
};

}  // namespace detail

/// Play out one IBR scenario. `policies` has one entry per honest node in
/// id order (roots, ISPs, clients, servers).
inline SimResult run_simulation(const NetworkConfig& cfg, const std::vector<PolicyParams>& policies,
                                std::uint64_t seed, const SimOptions& opt = {}) {
  return detail::Engine(cfg, policies, seed, opt).run();
}

}  // namespace cegta::ibr
