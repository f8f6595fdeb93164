#pragma once

#include <string>
#include <vector>

#include "cegta/game.hpp"
#include "cegta/ibr/simulator.hpp"
#include "cegta/reduction.hpp"
#include "cegta/scheduler.hpp"

namespace cegta::ibr {

/// Role names the oracle understands, in node-id order.
inline const std::vector<std::pair<std::string, NodeKind>>& role_kinds() {
  static const std::vector<std::pair<std::string, NodeKind>> k{
      {"root", NodeKind::root}, {"isp", NodeKind::isp}, {"client", NodeKind::client}, {"server", NodeKind::server}};
  return k;
}

/// Reduced-game roles for a network with the given player counts
/// (root, isp, client, server).
inline std::vector<RoleSpec> ibr_roles(const NetworkConfig& cfg, const std::vector<int>& players) {
  if (players.size() != 4) throw ConfigError("IBR games have 4 roles (root, isp, client, server)");
  const int nodes[4] = {cfg.n_roots, cfg.n_isps, cfg.n_clients(), cfg.n_servers()};
  std::vector<RoleSpec> roles;
  for (std::size_t i = 0; i < 4; ++i) {
    RoleSpec r;
    r.name = role_kinds()[i].first;
    r.player_count = players[i];
    r.node_count = nodes[i];
    r.validate();
    roles.push_back(r);
  }
  return roles;
}

/// Per-honest-node policies for a reduced profile: node k of a role plays the
/// strategy of player k % n_r.
inline std::vector<PolicyParams> expand_profile(const EmpiricalGame& g, const PureProfile& p,
                                                const NetworkConfig& cfg) {
  g.validate_profile(p);
  const auto red = make_reduction(g.roles());
  std::vector<PolicyParams> out(static_cast<std::size_t>(cfg.n_honest()));
  Topology shape;
  shape.root_begin = 0;
  shape.isp_begin = cfg.n_roots;
  shape.client_begin = shape.isp_begin + cfg.n_isps;
  shape.server_begin = shape.client_begin + cfg.n_clients();
  shape.attacker_begin = shape.server_begin + cfg.n_servers();
  std::vector<bool> assigned(out.size(), false);
  for (std::size_t r = 0; r < g.role_count(); ++r) {
    NodeKind kind{};
    bool known = false;
    for (const auto& [name, k] : role_kinds())
      if (name == g.role(r).name) {
        kind = k;
        known = true;
      }
    if (!known) throw ConfigError("role '" + g.role(r).name + "' is not an IBR role");
    const int base = shape.first_of(kind);
    const int count = shape.count_of(kind);
    if (count != g.role(r).node_count)
      throw ConfigError("role " + g.role(r).name + " declares " + std::to_string(g.role(r).node_count) +
                        " nodes but the network has " + std::to_string(count));
    for (int k = 0; k < count; ++k) {
      const int player = red.player_of(r, k);
      const int s = p.roles[r][static_cast<std::size_t>(player)];
      out[static_cast<std::size_t>(base + k)] = PolicyParams::from_vector(g.strategy(r, s).params);
      assigned[static_cast<std::size_t>(base + k)] = true;
    }
  }
  for (std::size_t i = 0; i < assigned.size(); ++i)
    if (!assigned[i]) throw ConfigError("node " + std::to_string(i) + " has no policy assigned");
  return out;
}

/// Payoff oracle over the IBR simulator with hierarchical reduction.
class IbrOracle : public ProfileOracle {
 public:
  IbrOracle(NetworkConfig cfg, PayoffWeights w = {}) : cfg_(std::move(cfg)) {
    cfg_.validate();
    opt_.weights = w;
  }

  std::vector<double> simulate(const EmpiricalGame& g, const PureProfile& p, std::uint64_t seed) const override {
    const auto policies = expand_profile(g, p, cfg_);
    const auto res = run_simulation(cfg_, policies, seed, opt_);
    const auto red = make_reduction(g.roles());
    std::vector<std::vector<double>> per_role(g.role_count());
    for (std::size_t r = 0; r < g.role_count(); ++r) {
      const NodeKind kind = kind_of(g.role(r).name);
      const int base = res.topology.first_of(kind);
      for (int k = 0; k < g.role(r).node_count; ++k)
        per_role[r].push_back(res.payoff[static_cast<std::size_t>(base + k)]);
    }
    const auto reduced = reduced_payoff(per_role, red);
    std::vector<double> out;
    for (const auto& v : reduced) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  const NetworkConfig& config() const { return cfg_; }
  const SimOptions& options() const { return opt_; }

 private:
  static NodeKind kind_of(const std::string& name) {
    for (const auto& [n, k] : role_kinds())
      if (n == name) return k;
    throw ConfigError("role '" + name + "' is not an IBR role");
  }

  NetworkConfig cfg_;
  SimOptions opt_;
};

}  // namespace cegta::ibr
