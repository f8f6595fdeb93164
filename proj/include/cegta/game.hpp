#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cegta/errors.hpp"
#include "cegta/payoff_db.hpp"
#include "cegta/profile.hpp"
#include "cegta/strategy.hpp"

namespace cegta {

using StrategySets = std::vector<std::vector<int>>;

inline bool same_params(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9) return false;
  return true;
}

/// Role-symmetric empirical game: roles, a per-role strategy catalog, the
/// candidate sets C_r (a subset of the catalog), and the payoff database.
///
/// The catalog also holds strategies that were only explored as deviations;
/// analysis looks at C only, but every catalogued strategy may appear in the
/// database.
class EmpiricalGame {
 public:
  EmpiricalGame() = default;
  explicit EmpiricalGame(std::vector<RoleSpec> roles) : roles_(std::move(roles)) {
    if (roles_.empty()) throw ConfigError("game needs at least one role");
    std::size_t off = 0;
    for (const auto& r : roles_) {
      r.validate();
      offsets_.push_back(off);
      off += static_cast<std::size_t>(r.player_count);
    }
    for (std::size_t i = 0; i < roles_.size(); ++i)
      for (std::size_t j = i + 1; j < roles_.size(); ++j)
        if (roles_[i].name == roles_[j].name) throw ConfigError("duplicate role " + roles_[i].name);
    catalog_.resize(roles_.size());
    candidates_.resize(roles_.size());
  }

  std::size_t role_count() const { return roles_.size(); }
  const RoleSpec& role(std::size_t r) const { return roles_.at(r); }
  const std::vector<RoleSpec>& roles() const { return roles_; }
  std::size_t role_index(std::string_view name) const {
    for (std::size_t r = 0; r < roles_.size(); ++r)
      if (roles_[r].name == name) return r;
    throw ConfigError("unknown role " + std::string(name));
  }
  std::vector<int> player_counts() const {
    std::vector<int> out;
    for (const auto& r : roles_) out.push_back(r.player_count);
    return out;
  }
  std::size_t total_players() const {
    return offsets_.empty() ? 0 : offsets_.back() + static_cast<std::size_t>(roles_.back().player_count);
  }
  std::size_t slot_offset(std::size_t r) const { return offsets_.at(r); }

  /// Register a strategy; returns its catalog index. Strategies of the same
  /// role with identical (non-empty) parameter vectors share one entry.
  int add_strategy(Strategy s, bool candidate = true) {
    const std::size_t r = role_index(s.role);
    s.validate();
    int idx = -1;
    if (!s.params.empty()) {
      if (auto found = find_by_params(r, s.params)) idx = *found;
    }
    if (idx < 0) {
      if (find_strategy(r, s.id)) throw ConfigError("duplicate strategy id " + s.id + " in role " + s.role);
      catalog_[r].push_back(std::move(s));
      idx = static_cast<int>(catalog_[r].size()) - 1;
    }
    if (candidate) add_candidate(r, idx);
    return idx;
  }

  std::optional<int> find_strategy(std::size_t r, std::string_view id) const {
    const auto& cat = catalog_.at(r);
    for (std::size_t i = 0; i < cat.size(); ++i)
      if (cat[i].id == id) return static_cast<int>(i);
    return std::nullopt;
  }
  std::optional<int> find_by_params(std::size_t r, const std::vector<double>& params) const {
    const auto& cat = catalog_.at(r);
    for (std::size_t i = 0; i < cat.size(); ++i)
      if (!params.empty() && same_params(cat[i].params, params)) return static_cast<int>(i);
    return std::nullopt;
  }
  const Strategy& strategy(std::size_t r, int idx) const { return catalog_.at(r).at(static_cast<std::size_t>(idx)); }
  Strategy& strategy(std::size_t r, int idx) { return catalog_.at(r).at(static_cast<std::size_t>(idx)); }
  std::size_t catalog_size(std::size_t r) const { return catalog_.at(r).size(); }

  const std::vector<int>& candidates(std::size_t r) const { return candidates_.at(r); }
  const StrategySets& candidate_sets() const { return candidates_; }
  bool is_candidate(std::size_t r, int idx) const {
    const auto& c = candidates_.at(r);
    return std::binary_search(c.begin(), c.end(), idx);
  }
  void add_candidate(std::size_t r, int idx) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= catalog_.at(r).size())
      throw ConfigError("candidate index out of range");
    auto& c = candidates_[r];
    auto it = std::lower_bound(c.begin(), c.end(), idx);
    if (it == c.end() || *it != idx) c.insert(it, idx);
  }

  PayoffDatabase& db() { return db_; }
  const PayoffDatabase& db() const { return db_; }

  /// Validate `p` against role sizes and the catalog.
  void validate_profile(const PureProfile& p) const {
    if (p.roles.size() != roles_.size()) throw DataError("profile has wrong number of roles");
    if (!p.canonical()) throw DataError("profile " + profile_id(p) + " is not canonical");
    for (std::size_t r = 0; r < roles_.size(); ++r) {
      if (p.roles[r].size() != static_cast<std::size_t>(roles_[r].player_count))
        throw DataError("role " + roles_[r].name + " has " + std::to_string(p.roles[r].size()) +
                        " players, expected " + std::to_string(roles_[r].player_count));
      for (int s : p.roles[r])
        if (s < 0 || static_cast<std::size_t>(s) >= catalog_[r].size())
          throw DataError("unknown strategy index " + std::to_string(s) + " in role " + roles_[r].name);
    }
  }

  void record_observation(const PureProfile& p, std::vector<double> payoffs, std::uint64_t seed,
                          std::optional<std::int64_t> timestamp = std::nullopt) {
    validate_profile(p);
    if (payoffs.size() != total_players())
      throw DataError("payoff vector has " + std::to_string(payoffs.size()) + " entries, expected " +
                      std::to_string(total_players()));
    const auto ts = timestamp ? *timestamp
                              : std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::system_clock::now().time_since_epoch())
                                    .count();
    db_.append(Observation{p, std::move(payoffs), seed, ts});
  }

  std::size_t samples(const PureProfile& p) const { return db_.count(p); }
  bool evaluated(const PureProfile& p) const { return db_.count(p) >= 1; }

  /// Sample-mean payoff to a role-`r` player using strategy `s` in `p`
  /// (averaged over the slots holding that strategy).
  std::optional<double> payoff(const PureProfile& p, std::size_t r, int s) const {
    auto st = db_.stats(p);
    if (!st) return std::nullopt;
    double sum = 0.0;
    int n = 0;
    const auto& slots = p.roles[r];
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i] == s) {
        sum += st->mean[offsets_[r] + i];
        ++n;
      }
    }
    if (n == 0) throw DataError("strategy " + strategy(r, s).id + " not present in " + profile_id(p));
    return sum / n;
  }

  std::string profile_id(const PureProfile& p) const {
    std::string out;
    for (std::size_t r = 0; r < p.roles.size() && r < roles_.size(); ++r) {
      if (r) out += ';';
      out += roles_[r].name + ':';
      for (std::size_t i = 0; i < p.roles[r].size(); ++i) {
        if (i) out += ',';
        const int s = p.roles[r][i];
        out += (s >= 0 && static_cast<std::size_t>(s) < catalog_[r].size()) ? catalog_[r][static_cast<std::size_t>(s)].id
                                                                             : "#" + std::to_string(s);
      }
    }
    return out;
  }

  /// Human-readable mixture, e.g. "client:[C .50; N .50] isp:N".
  std::string mixture_id(const MixedProfile& q) const {
    std::string out;
    for (std::size_t r = 0; r < q.roles.size(); ++r) {
      if (r) out += ' ';
      out += roles_[r].name + ':';
      if (q.roles[r].size() == 1) {
        out += strategy(r, q.roles[r].begin()->first).id;
        continue;
      }
      out += '[';
      bool first = true;
      for (const auto& [s, p] : q.roles[r]) {
        if (!first) out += "; ";
        first = false;
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.4f", p);
        out += strategy(r, s).id + buf;
      }
      out += ']';
    }
    return out;
  }

  /// Size of the pure-profile space over C.
  double profile_space_size() const {
    double n = 1.0;
    for (std::size_t r = 0; r < roles_.size(); ++r)
      n *= multiset_count(static_cast<int>(candidates_[r].size()), roles_[r].player_count);
    return n;
  }

  /// Number of profiles over C with at least one sample.
  std::size_t evaluated_in_candidates() const {
    std::size_t n = 0;
    for (const auto& p : db_.profiles()) {
      bool inside = true;
      for (std::size_t r = 0; r < p.roles.size() && inside; ++r)
        for (int s : p.roles[r])
          if (!is_candidate(r, s)) {
            inside = false;
            break;
          }
      if (inside) ++n;
    }
    return n;
  }

 private:
  std::vector<RoleSpec> roles_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<Strategy>> catalog_;
  StrategySets candidates_;
  PayoffDatabase db_;
};

/// Pure profiles in the support of `q`.
inline std::vector<PureProfile> support_profiles(const MixedProfile& q, const std::vector<int>& sizes) {
  std::vector<std::vector<int>> sets(q.roles.size());
  for (std::size_t r = 0; r < q.roles.size(); ++r) sets[r] = q.support(r);
  std::vector<PureProfile> out;
  for_each_profile(sets, sizes, [&](const PureProfile& p) { out.push_back(p); });
  return out;
}

inline bool in_support(const MixedProfile& q, const PureProfile& p) {
  for (std::size_t r = 0; r < p.roles.size(); ++r)
    for (int s : p.roles[r])
      if (q.prob(r, s) <= 0.0) return false;
  return true;
}

/// Profiles reached when one role-`role` player switches to one of
/// `strategies` while everyone else draws from Support(q). Profiles that are
/// themselves in Support(q) are excluded.
inline std::set<PureProfile> deviation_profiles(const EmpiricalGame& game, const MixedProfile& q,
                                                std::size_t role, const std::vector<int>& strategies) {
  if (role >= game.role_count()) throw ConfigError("unknown role index " + std::to_string(role));
  for (int s : strategies)
    if (s < 0 || static_cast<std::size_t>(s) >= game.catalog_size(role))
      throw ConfigError("deviation strategy not in role " + game.role(role).name);
  std::set<PureProfile> out;
  for_each_opponent_draw(q, game.player_counts(), role, [&](const PureProfile& opp, double) {
    for (int s : strategies) {
      auto p = with_player(opp, role, s);
      if (!in_support(q, p)) out.insert(std::move(p));
    }
  });
  return out;
}

/// Role-symmetric view of which strategies appear in `q` per role.
inline StrategySets strategies_in(const MixedProfile& q) {
  StrategySets out(q.roles.size());
  for (std::size_t r = 0; r < q.roles.size(); ++r) out[r] = q.support(r);
  return out;
}

}  // namespace cegta
