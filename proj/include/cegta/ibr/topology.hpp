#pragma once

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "cegta/ibr/config.hpp"
#include "cegta/rng.hpp"

namespace cegta::ibr {

enum class NodeKind : std::uint8_t { root, isp, client, server, attacker, rep_attacker };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::root: return "root";
    case NodeKind::isp: return "isp";
    case NodeKind::client: return "client";
    case NodeKind::server: return "server";
    case NodeKind::attacker: return "attacker";
    case NodeKind::rep_attacker: return "rep_attacker";
  }
  return "?";
}

inline bool is_honest(NodeKind k) { return k != NodeKind::attacker && k != NodeKind::rep_attacker; }

/// A priori network: roots [0, R), ISPs, clients, servers, attackers,
/// reputation attackers, in that id order.
struct Topology {
  std::vector<NodeKind> kind;
  /// Attachment ISP for leaves; -1 for roots and ISPs.
  std::vector<int> isp_of;
  /// Root pair of each ISP (indexed by ISP ordinal), sorted.
  std::vector<std::pair<int, int>> isp_roots;
  /// A priori neighbors per node, sorted.
  std::vector<std::vector<int>> adjacent;
  /// Fixed target per attacker / reputation attacker (-1 otherwise).
  std::vector<int> target;

  int root_begin = 0, isp_begin = 0, client_begin = 0, server_begin = 0, attacker_begin = 0, rep_begin = 0;
  int n_nodes = 0;

  std::size_t size() const { return kind.size(); }
  int first_of(NodeKind k) const {
    switch (k) {
      case NodeKind::root: return root_begin;
      case NodeKind::isp: return isp_begin;
      case NodeKind::client: return client_begin;
      case NodeKind::server: return server_begin;
      case NodeKind::attacker: return attacker_begin;
      case NodeKind::rep_attacker: return rep_begin;
    }
    return 0;
  }
  int count_of(NodeKind k) const {
    switch (k) {
      case NodeKind::root: return isp_begin - root_begin;
      case NodeKind::isp: return client_begin - isp_begin;
      case NodeKind::client: return server_begin - client_begin;
      case NodeKind::server: return attacker_begin - server_begin;
      case NodeKind::attacker: return rep_begin - attacker_begin;
      case NodeKind::rep_attacker: return n_nodes - rep_begin;
    }
    return 0;
  }
  bool apriori(int a, int b) const {
    const auto& adj = adjacent[static_cast<std::size_t>(a)];
    return std::binary_search(adj.begin(), adj.end(), b);
  }
  std::pair<int, int> roots_of_isp(int isp) const { return isp_roots[static_cast<std::size_t>(isp - isp_begin)]; }
};

inline Topology build_topology(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Topology t;
  t.root_begin = 0;
  t.isp_begin = cfg.n_roots;
  t.client_begin = t.isp_begin + cfg.n_isps;
  t.server_begin = t.client_begin + cfg.n_clients();
  t.attacker_begin = t.server_begin + cfg.n_servers();
  t.rep_begin = t.attacker_begin + cfg.n_attackers;
  t.n_nodes = t.rep_begin + cfg.n_rep_attackers;
  const auto n = static_cast<std::size_t>(t.n_nodes);
  t.kind.resize(n);
  t.isp_of.assign(n, -1);
  t.adjacent.resize(n);
  t.target.assign(n, -1);

  std::mt19937_64 rng(mix_seed(seed, 0x70706f6cULL));
  auto link = [&](int a, int b) {
    t.adjacent[static_cast<std::size_t>(a)].push_back(b);
    t.adjacent[static_cast<std::size_t>(b)].push_back(a);
  };
  for (int r = 0; r < cfg.n_roots; ++r) {
    t.kind[static_cast<std::size_t>(r)] = NodeKind::root;
    for (int o = 0; o < r; ++o) link(o, r);
  }
  for (int i = 0; i < cfg.n_isps; ++i) {
    const int isp = t.isp_begin + i;
    t.kind[static_cast<std::size_t>(isp)] = NodeKind::isp;
    std::uniform_int_distribution<int> pick(0, cfg.n_roots - 1);
    int a = pick(rng);
    int b = pick(rng);
    while (b == a) b = pick(rng);
    if (a > b) std::swap(a, b);
    t.isp_roots.emplace_back(a, b);
    link(isp, a);
    link(isp, b);
  }
  auto attach = [&](int node, int isp, NodeKind k) {
    t.kind[static_cast<std::size_t>(node)] = k;
    t.isp_of[static_cast<std::size_t>(node)] = isp;
    link(node, isp);
  };
  for (int j = 0; j < cfg.n_clients(); ++j) attach(t.client_begin + j, t.isp_begin + j / cfg.clients_per_isp, NodeKind::client);
  for (int i = 0; i < cfg.n_servers(); ++i) attach(t.server_begin + i, t.isp_begin + i, NodeKind::server);
  std::uniform_int_distribution<int> any_isp(0, cfg.n_isps - 1);
  auto pick_target = [&](TargetSet set) {
    if (set == TargetSet::servers_only)
      return t.server_begin + std::uniform_int_distribution<int>(0, cfg.n_servers() - 1)(rng);
    return t.client_begin + std::uniform_int_distribution<int>(0, cfg.n_clients() + cfg.n_servers() - 1)(rng);
  };
  for (int a = 0; a < cfg.n_attackers; ++a) {
    attach(t.attacker_begin + a, t.isp_begin + any_isp(rng), NodeKind::attacker);
    t.target[static_cast<std::size_t>(t.attacker_begin + a)] = pick_target(cfg.attack_targets);
  }
  for (int a = 0; a < cfg.n_rep_attackers; ++a) {
    attach(t.rep_begin + a, t.isp_begin + any_isp(rng), NodeKind::rep_attacker);
    t.target[static_cast<std::size_t>(t.rep_begin + a)] = pick_target(cfg.rep_attack_targets);
  }
  for (auto& adj : t.adjacent) std::sort(adj.begin(), adj.end());
  return t;
}

}  // namespace cegta::ibr
