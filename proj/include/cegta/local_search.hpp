#pragma once

#include <set>
#include <vector>

#include "cegta/compliance.hpp"

namespace cegta {

enum class ComplianceMode { non_compliant, compliant };

inline const char* to_string(ComplianceMode m) {
  return m == ComplianceMode::compliant ? "compliant" : "non-compliant";
}

/// Grid coordinates of a parameter vector; used to compare strategies.
using GridKey = std::vector<long>;

inline GridKey grid_key(const Strategy& s) {
  GridKey k;
  for (std::size_t i = 0; i < s.params.size(); ++i) k.push_back(s.domains.at(i).index_of(s.params[i]));
  return k;
}

inline bool has_polarity(const Strategy& s, const ComplianceSpec& spec, ComplianceMode mode) {
  const double c = strategy_compliance(s, spec);
  return mode == ComplianceMode::compliant ? c > 0 : c <= 0;
}

/// Neighbors of the seeds one parameter at a time, k grid steps away,
/// escalating k until some unexplored neighbor has the requested polarity.
inline std::vector<Strategy> local_search(const std::vector<Strategy>& seeds, const std::set<GridKey>& explored,
                                          ComplianceMode mode, const ComplianceSpec& spec) {
  if (seeds.empty()) throw ConfigError("local_search needs at least one seed");
  long widest = 0;
  for (const auto& s : seeds)
    for (const auto& d : s.domains) widest = std::max(widest, d.steps());

  for (long k = 1; k <= widest; ++k) {
    std::vector<Strategy> out;
    std::set<GridKey> seen;
    for (const auto& seed : seeds) {
      for (std::size_t i = 0; i < seed.params.size(); ++i) {
        const auto& d = seed.domains[i];
        const long base = d.index_of(seed.params[i]);
        for (long dir : {-1L, 1L}) {
          Strategy n = seed;
          n.params[i] = d.at(base + dir * k);
          if (n.params[i] == seed.params[i]) continue;
          n.id.clear();
          n.label.clear();
          n.auto_generated = true;
          auto key = grid_key(n);
          if (explored.count(key) || !seen.insert(key).second) continue;
          if (!has_polarity(n, spec, mode)) continue;
          out.push_back(std::move(n));
        }
      }
    }
    if (!out.empty()) return out;
  }
  throw RegionExhausted(std::string("no unexplored ") + to_string(mode) + " neighbor within reach");
}

}  // namespace cegta
