#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cegta/errors.hpp"
#include "cegta/strategy.hpp"

namespace cegta {

/// Hierarchical reduction: every node of a role belongs to exactly one
/// reduced player of that role. Node i of a role maps to player i % players,
/// so each player's group is spread evenly over the node population.
struct ReductionMap {
  std::vector<std::string> role_names;
  std::vector<int> node_counts;
  std::vector<int> player_counts;

  int group_size(std::size_t r) const { return node_counts.at(r) / player_counts.at(r); }
  int player_of(std::size_t r, int node) const { return node % player_counts.at(r); }
  /// Role-local node indices represented by player `player` of role `r`.
  std::vector<int> group(std::size_t r, int player) const {
    std::vector<int> out;
    for (int n = player; n < node_counts.at(r); n += player_counts.at(r)) out.push_back(n);
    return out;
  }
};

inline ReductionMap make_reduction(const std::vector<int>& node_counts, const std::vector<int>& player_counts,
                                   const std::vector<std::string>& names = {}) {
  if (node_counts.size() != player_counts.size()) throw ConfigError("reduction: role count mismatch");
  ReductionMap m;
  for (std::size_t r = 0; r < node_counts.size(); ++r) {
    const std::string name = r < names.size() ? names[r] : "role " + std::to_string(r);
    if (player_counts[r] < 1 || node_counts[r] < player_counts[r] || node_counts[r] % player_counts[r] != 0)
      throw ConfigError("reduction: role " + name + " has " + std::to_string(node_counts[r]) +
                        " nodes, not divisible into " + std::to_string(player_counts[r]) + " players");
    m.role_names.push_back(name);
  }
  m.node_counts = node_counts;
  m.player_counts = player_counts;
  return m;
}

inline ReductionMap make_reduction(const std::vector<RoleSpec>& roles) {
  std::vector<int> nodes, players;
  std::vector<std::string> names;
  for (const auto& r : roles) {
    nodes.push_back(r.node_count);
    players.push_back(r.player_count);
    names.push_back(r.name);
  }
  return make_reduction(nodes, players, names);
}

/// Per-role node payoffs -> per-role player payoffs (group means).
inline std::vector<std::vector<double>> reduced_payoff(const std::vector<std::vector<double>>& node_payoffs,
                                                       const ReductionMap& m) {
  if (node_payoffs.size() != m.node_counts.size()) throw DataError("reduced_payoff: role count mismatch");
  std::vector<std::vector<double>> out(m.node_counts.size());
  for (std::size_t r = 0; r < m.node_counts.size(); ++r) {
    if (node_payoffs[r].size() != static_cast<std::size_t>(m.node_counts[r]))
      throw DataError("reduced_payoff: role " + m.role_names[r] + " has " + std::to_string(node_payoffs[r].size()) +
                      " node payoffs, expected " + std::to_string(m.node_counts[r]));
    std::vector<double> sum(static_cast<std::size_t>(m.player_counts[r]), 0.0);
    for (int n = 0; n < m.node_counts[r]; ++n) {
      const double v = node_payoffs[r][static_cast<std::size_t>(n)];
      if (!std::isfinite(v))
        throw DataError("reduced_payoff: node " + std::to_string(n) + " of role " + m.role_names[r] +
                        " has no finite payoff");
    }
    for (int n = 0; n < m.node_counts[r]; ++n) sum[static_cast<std::size_t>(m.player_of(r, n))] += node_payoffs[r][static_cast<std::size_t>(n)];
    for (auto& s : sum) s /= m.group_size(r);
    out[r] = std::move(sum);
  }
  return out;
}

}  // namespace cegta
