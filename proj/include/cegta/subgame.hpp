#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cegta/game.hpp"

namespace cegta {

/// Per-role strategy subsets C'_r of C_r, each sorted and nonempty.
using Subgame = StrategySets;

inline std::size_t subgame_size(const Subgame& s) {
  std::size_t n = 0;
  for (const auto& r : s) n += r.size();
  return n;
}

inline bool subgame_contains(const Subgame& outer, const Subgame& inner) {
  for (std::size_t r = 0; r < outer.size(); ++r)
    if (!std::includes(outer[r].begin(), outer[r].end(), inner[r].begin(), inner[r].end())) return false;
  return true;
}

inline Subgame subgame_with(Subgame s, std::size_t role, int strategy) {
  auto& v = s[role];
  auto it = std::lower_bound(v.begin(), v.end(), strategy);
  if (it == v.end() || *it != strategy) v.insert(it, strategy);
  return s;
}

inline Subgame subgame_without(Subgame s, std::size_t role, int strategy) {
  auto& v = s[role];
  v.erase(std::remove(v.begin(), v.end(), strategy), v.end());
  return s;
}

/// Lexicographic key by role, then strategy id.
inline std::vector<std::pair<std::size_t, std::string>> subgame_key(const EmpiricalGame& g, const Subgame& s) {
  std::vector<std::pair<std::size_t, std::string>> key;
  for (std::size_t r = 0; r < s.size(); ++r) {
    std::vector<std::string> ids;
    for (int i : s[r]) ids.push_back(g.strategy(r, i).id);
    std::sort(ids.begin(), ids.end());
    for (auto& id : ids) key.emplace_back(r, std::move(id));
  }
  return key;
}

inline std::string subgame_id(const EmpiricalGame& g, const Subgame& s) {
  std::string out;
  for (std::size_t r = 0; r < s.size(); ++r) {
    if (r) out += ';';
    out += g.role(r).name + ":{";
    for (std::size_t i = 0; i < s[r].size(); ++i) {
      if (i) out += ',';
      out += g.strategy(r, s[r][i]).id;
    }
    out += '}';
  }
  return out;
}

/// First unevaluated profile over `s`, if any.
inline std::optional<PureProfile> first_missing(const EmpiricalGame& g, const Subgame& s) {
  std::optional<PureProfile> missing;
  visit_profiles(s, g.player_counts(), [&](const PureProfile& p) {
    if (g.evaluated(p)) return true;
    missing = p;
    return false;
  });
  return missing;
}

inline bool is_complete(const EmpiricalGame& g, const Subgame& s) {
  for (const auto& r : s)
    if (r.empty()) return false;
  return !first_missing(g, s).has_value();
}

/// Completeness of `base` + `strategy` in `role`, given `base` complete:
/// only profiles using the new strategy need checking.
inline bool extension_complete(const EmpiricalGame& g, const Subgame& base, std::size_t role, int strategy) {
  auto sets = subgame_with(base, role, strategy);
  auto sizes = g.player_counts();
  sizes[role] -= 1;
  return visit_profiles(sets, sizes, [&](const PureProfile& opp) { return g.evaluated(with_player(opp, role, strategy)); });
}

namespace detail {

inline std::vector<Subgame> keep_maximal(std::set<Subgame> found) {
  std::vector<Subgame> all(found.begin(), found.end());
  std::sort(all.begin(), all.end(),
            [](const Subgame& a, const Subgame& b) { return subgame_size(a) > subgame_size(b); });
  std::vector<Subgame> out;
  for (const auto& s : all) {
    bool dominated = false;
    for (const auto& m : out)
      if (subgame_contains(m, s)) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Grow from complete one-strategy-per-role subgames by single additions.
/// Visits every complete subgame once; suited to sparse data.
inline std::vector<Subgame> maximal_bottom_up(const EmpiricalGame& g) {
  const auto& C = g.candidate_sets();
  const auto sizes = g.player_counts();
  std::set<Subgame> frontier;
  for (const auto& p : g.db().profiles()) {
    Subgame s(p.roles.size());
    bool ok = true;
    for (std::size_t r = 0; r < p.roles.size() && ok; ++r) {
      const auto& slot = p.roles[r];
      if (slot.empty() || slot.front() != slot.back() || !g.is_candidate(r, slot.front())) ok = false;
      else s[r] = {slot.front()};
    }
    if (ok) frontier.insert(std::move(s));
  }
  std::set<Subgame> complete = frontier;
  std::set<Subgame> incomplete;
  std::set<Subgame> maximal;
  while (!frontier.empty()) {
    std::set<Subgame> next;
    for (const auto& x : frontier) {
      bool is_max = true;
      for (std::size_t r = 0; r < C.size(); ++r) {
        for (int s : C[r]) {
          if (std::binary_search(x[r].begin(), x[r].end(), s)) continue;
          auto y = subgame_with(x, r, s);
          if (complete.count(y)) {
            is_max = false;
            continue;
          }
          if (incomplete.count(y)) continue;
          if (extension_complete(g, x, r, s)) {
            is_max = false;
            complete.insert(y);
            next.insert(std::move(y));
          } else {
            incomplete.insert(std::move(y));
          }
        }
      }
      if (is_max) maximal.insert(x);
    }
    frontier = std::move(next);
  }
  return keep_maximal(std::move(maximal));
}

/// Shrink from C: any complete subgame omits some strategy of each missing
/// profile, so branch on those strategies. Suited to dense data.
inline std::vector<Subgame> maximal_top_down(const EmpiricalGame& g) {
  std::set<Subgame> visited;
  std::set<Subgame> complete;
  std::vector<Subgame> stack{g.candidate_sets()};
  for (const auto& r : stack.front())
    if (r.empty()) return {};
  while (!stack.empty()) {
    Subgame x = std::move(stack.back());
    stack.pop_back();
    if (!visited.insert(x).second) continue;
    auto missing = first_missing(g, x);
    if (!missing) {
      complete.insert(x);
      continue;
    }
    for (std::size_t r = 0; r < x.size(); ++r) {
      if (x[r].size() < 2) continue;
      auto& slot = missing->roles[r];
      for (std::size_t i = 0; i < slot.size(); ++i) {
        if (i > 0 && slot[i] == slot[i - 1]) continue;
        auto y = subgame_without(x, r, slot[i]);
        if (!visited.count(y)) stack.push_back(std::move(y));
      }
    }
  }
  return keep_maximal(std::move(complete));
}

}  // namespace detail

enum class SubgameAlgorithm { automatic, bottom_up, top_down };

/// All maximal complete subgames of G(C), sorted and deduplicated.
inline std::vector<Subgame> maximal_complete_subgames(const EmpiricalGame& g,
                                                      SubgameAlgorithm algo = SubgameAlgorithm::automatic) {
  if (algo == SubgameAlgorithm::automatic) {
    const double space = g.profile_space_size();
    const double covered = static_cast<double>(g.evaluated_in_candidates());
    algo = (space > 0 && covered / space >= 0.5) ? SubgameAlgorithm::top_down : SubgameAlgorithm::bottom_up;
  }
  return algo == SubgameAlgorithm::top_down ? detail::maximal_top_down(g) : detail::maximal_bottom_up(g);
}

}  // namespace cegta
