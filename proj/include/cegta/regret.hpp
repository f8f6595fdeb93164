#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "cegta/game.hpp"

namespace cegta {

/// u_r(s, q): expected payoff to one role-`role` player using `s` while every
/// other player draws from q. Nullopt if a needed profile is unevaluated;
/// `missing` then receives it.
inline std::optional<double> try_expected_payoff(const EmpiricalGame& g, const MixedProfile& q, std::size_t role,
                                                 int s, PureProfile* missing = nullptr) {
  double total = 0.0;
  bool ok = true;
  for_each_opponent_draw(q, g.player_counts(), role, [&](const PureProfile& opp, double prob) {
    if (!ok) return;
    auto p = with_player(opp, role, s);
    auto u = g.payoff(p, role, s);
    if (!u) {
      ok = false;
      if (missing) *missing = std::move(p);
      return;
    }
    total += prob * *u;
  });
  if (!ok) return std::nullopt;
  return total;
}

inline double expected_payoff(const EmpiricalGame& g, const MixedProfile& q, std::size_t role, int s) {
  PureProfile missing;
  auto u = try_expected_payoff(g, q, role, s, &missing);
  if (!u) throw IncompleteData(g.profile_id(missing));
  return *u;
}

/// Expected payoff to role `role` under q itself.
inline double profile_payoff(const EmpiricalGame& g, const MixedProfile& q, std::size_t role) {
  double u = 0.0;
  for (const auto& [s, p] : q.roles[role]) u += p * expected_payoff(g, q, role, s);
  return u;
}

struct RegretResult {
  /// max(0, max_gain)
  double regret = 0.0;
  double max_gain = -std::numeric_limits<double>::infinity();
  /// Role achieving max_gain.
  std::size_t best_role = 0;
  /// Per role, the evaluated scope strategy with the highest payoff.
  std::vector<int> best_response;
  std::vector<double> role_gain;
  bool fully_evaluated = true;

  /// Best response of the role with the largest gain.
  int best_strategy() const { return best_response.empty() ? -1 : best_response[best_role]; }
};

/// Regret of q against deviations in `scope` (per-role strategy lists).
/// Deviations whose profiles lack samples are skipped and clear
/// `fully_evaluated`. Throws IncompleteData if Support(q) is unevaluated.
inline RegretResult regret(const EmpiricalGame& g, const MixedProfile& q, const StrategySets& scope) {
  RegretResult res;
  const std::size_t R = g.role_count();
  res.best_response.assign(R, -1);
  res.role_gain.assign(R, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < R; ++r) {
    std::map<int, double> support_u;
    double uq = 0.0;
    for (const auto& [t, p] : q.roles[r]) {
      const double u = expected_payoff(g, q, r, t);
      support_u[t] = u;
      uq += p * u;
    }
    // ascending strategy index, first maximum wins
    std::vector<int> candidates = scope[r];
    for (const auto& [t, u] : support_u) candidates.push_back(t);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    double best_u = -std::numeric_limits<double>::infinity();
    for (int s : candidates) {
      std::optional<double> u;
      if (auto it = support_u.find(s); it != support_u.end()) u = it->second;
      else u = try_expected_payoff(g, q, r, s);
      if (!u) {
        res.fully_evaluated = false;
        continue;
      }
      if (*u > best_u) {
        best_u = *u;
        res.best_response[r] = s;
      }
    }
    res.role_gain[r] = best_u - uq;
    if (res.role_gain[r] > res.max_gain) {
      res.max_gain = res.role_gain[r];
      res.best_role = r;
    }
  }
  res.regret = std::max(0.0, res.max_gain);
  return res;
}

}  // namespace cegta
