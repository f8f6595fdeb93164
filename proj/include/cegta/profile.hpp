#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "cegta/errors.hpp"

namespace cegta {

/// Per role, the multiset of strategy indices held by that role's players.
/// Canonical form keeps each role's indices sorted.
struct PureProfile {
  std::vector<std::vector<int>> roles;

  bool canonical() const {
    return std::all_of(roles.begin(), roles.end(),
                       [](const auto& r) { return std::is_sorted(r.begin(), r.end()); });
  }
  PureProfile& canonicalize() {
    for (auto& r : roles) std::sort(r.begin(), r.end());
    return *this;
  }
  std::size_t player_count() const {
    std::size_t n = 0;
    for (const auto& r : roles) n += r.size();
    return n;
  }
  int count(std::size_t role, int strategy) const {
    return static_cast<int>(std::count(roles[role].begin(), roles[role].end(), strategy));
  }

  friend bool operator==(const PureProfile&, const PureProfile&) = default;
  friend auto operator<=>(const PureProfile&, const PureProfile&) = default;
};

struct PureProfileHash {
  std::size_t operator()(const PureProfile& p) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& r : p.roles) {
      for (int s : r) {
        h ^= static_cast<std::uint64_t>(s) + 0x9e3779b97f4a7c15ULL;
        h *= 1099511628211ULL;
      }
      h ^= 0xffULL;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Role-symmetric mixed profile: per role, strategy index -> probability.
/// Zero-probability entries are never stored.
struct MixedProfile {
  std::vector<std::map<int, double>> roles;

  static MixedProfile pure(const PureProfile& p) {
    MixedProfile q;
    q.roles.resize(p.roles.size());
    for (std::size_t r = 0; r < p.roles.size(); ++r) {
      for (int s : p.roles[r]) q.roles[r][s] += 1.0;
      for (auto& [s, w] : q.roles[r]) w /= static_cast<double>(p.roles[r].size());
    }
    return q;
  }

  double prob(std::size_t role, int strategy) const {
    auto it = roles[role].find(strategy);
    return it == roles[role].end() ? 0.0 : it->second;
  }
  std::vector<int> support(std::size_t role) const {
    std::vector<int> out;
    for (const auto& [s, p] : roles[role])
      if (p > 0.0) out.push_back(s);
    return out;
  }
  bool is_pure() const {
    return std::all_of(roles.begin(), roles.end(), [](const auto& r) { return r.size() == 1; });
  }
  void validate(double tol = 1e-9) const {
    for (std::size_t r = 0; r < roles.size(); ++r) {
      double total = 0.0;
      for (const auto& [s, p] : roles[r]) {
        if (p < 0.0) throw DataError("negative probability in mixed profile");
        total += p;
      }
      if (std::abs(total - 1.0) > tol) throw DataError("mixture for role " + std::to_string(r) +
                                                       " sums to " + std::to_string(total));
    }
  }
  /// L-infinity distance over the union of supports.
  double distance(const MixedProfile& o) const {
    double d = 0.0;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      for (const auto& [s, p] : roles[r]) d = std::max(d, std::abs(p - o.prob(r, s)));
      for (const auto& [s, p] : o.roles[r]) d = std::max(d, std::abs(p - prob(r, s)));
    }
    return d;
  }
  /// Drop entries below `min_prob` and renormalise each role.
  MixedProfile pruned(double min_prob) const {
    MixedProfile out;
    out.roles.resize(roles.size());
    for (std::size_t r = 0; r < roles.size(); ++r) {
      double total = 0.0;
      for (const auto& [s, p] : roles[r])
        if (p >= min_prob) total += p;
      if (total <= 0.0) {
        // keep the heaviest strategy rather than an empty role
        auto best = std::max_element(roles[r].begin(), roles[r].end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
        out.roles[r][best->first] = 1.0;
        continue;
      }
      for (const auto& [s, p] : roles[r])
        if (p >= min_prob) out.roles[r][s] = p / total;
    }
    return out;
  }
};

/// Visit every multiset of size `n` over items 0..k-1 as a nondecreasing
/// index vector. `fn` returns false to stop; the return value reports whether
/// the walk ran to completion.
template <class F>
bool visit_multisets(int k, int n, F&& fn) {
  std::vector<int> a(static_cast<std::size_t>(std::max(n, 0)), 0);
  if (n == 0) return fn(a);
  if (k <= 0) return true;
  while (true) {
    if (!fn(a)) return false;
    int i = n - 1;
    while (i >= 0 && a[static_cast<std::size_t>(i)] == k - 1) --i;
    if (i < 0) return true;
    const int v = a[static_cast<std::size_t>(i)] + 1;
    for (int j = i; j < n; ++j) a[static_cast<std::size_t>(j)] = v;
  }
}

inline std::vector<int> index_counts(const std::vector<int>& idx, int k) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int i : idx) ++counts[static_cast<std::size_t>(i)];
  return counts;
}

/// n! / prod(c_i!) for a count vector summing to n.
inline double multinomial(const std::vector<int>& counts) {
  double result = 1.0;
  int n = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      ++n;
      result *= static_cast<double>(n) / static_cast<double>(i);
    }
  }
  return result;
}

/// Number of multisets of size n over k items: C(n + k - 1, n).
inline double multiset_count(int k, int n) {
  double r = 1.0;
  for (int i = 1; i <= n; ++i) r = r * static_cast<double>(k - 1 + i) / static_cast<double>(i);
  return r;
}

/// Enumerate pure profiles over per-role strategy sets (each sorted), with
/// `sizes[r]` players in role r, until `fn` returns false. Profiles are
/// canonical. Returns false if stopped early.
inline bool visit_profiles(const std::vector<std::vector<int>>& sets, const std::vector<int>& sizes,
                           const std::function<bool(const PureProfile&)>& fn) {
  PureProfile p;
  p.roles.resize(sets.size());
  std::function<bool(std::size_t)> rec = [&](std::size_t r) -> bool {
    if (r == sets.size()) return fn(p);
    const auto& set = sets[r];
    return visit_multisets(static_cast<int>(set.size()), sizes[r], [&](const std::vector<int>& idx) {
      auto& slot = p.roles[r];
      slot.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) slot[i] = set[static_cast<std::size_t>(idx[i])];
      return rec(r + 1);
    });
  };
  return rec(0);
}

inline void for_each_profile(const std::vector<std::vector<int>>& sets, const std::vector<int>& sizes,
                             const std::function<void(const PureProfile&)>& fn) {
  visit_profiles(sets, sizes, [&](const PureProfile& p) {
    fn(p);
    return true;
  });
}

/// Visit the opponent draws that a single role-`role` player faces under `q`:
/// every role contributes its player count, less one for `role`. The callback
/// gets the sorted opponent profile and its probability.
inline void for_each_opponent_draw(const MixedProfile& q, const std::vector<int>& sizes, std::size_t role,
                                   const std::function<void(const PureProfile&, double)>& fn) {
  std::vector<std::vector<int>> support(q.roles.size());
  std::vector<std::vector<double>> probs(q.roles.size());
  for (std::size_t r = 0; r < q.roles.size(); ++r) {
    for (const auto& [s, p] : q.roles[r]) {
      if (p > 0.0) {
        support[r].push_back(s);
        probs[r].push_back(p);
      }
    }
  }
  PureProfile p;
  p.roles.resize(q.roles.size());
  std::function<void(std::size_t, double)> rec = [&](std::size_t r, double prob) {
    if (r == q.roles.size()) {
      fn(p, prob);
      return;
    }
    const int k = static_cast<int>(support[r].size());
    const int n = sizes[r] - (r == role ? 1 : 0);
    visit_multisets(k, n, [&](const std::vector<int>& idx) {
      const auto counts = index_counts(idx, k);
      double pr = multinomial(counts);
      for (std::size_t i = 0; i < counts.size(); ++i) pr *= std::pow(probs[r][i], counts[i]);
      auto& slot = p.roles[r];
      slot.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) slot[i] = support[r][static_cast<std::size_t>(idx[i])];
      if (pr > 0.0) rec(r + 1, prob * pr);
      return true;
    });
  };
  rec(0, 1.0);
}

/// Insert `strategy` into role `role` of an opponent draw, keeping it canonical.
inline PureProfile with_player(PureProfile p, std::size_t role, int strategy) {
  auto& slot = p.roles[role];
  slot.insert(std::upper_bound(slot.begin(), slot.end(), strategy), strategy);
  return p;
}

}  // namespace cegta
