#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cegta/game.hpp"

namespace cegta {

/// Compliant open interval for one parameter. Either bound may be infinite.
struct ComplianceInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

enum class Aggregation { min_margin, binary };

/// Designer's compliance region: a box of open intervals over the parameter
/// vector. Unconstrained parameters are left empty.
struct ComplianceSpec {
  std::vector<std::optional<ComplianceInterval>> intervals;
  Aggregation aggregation = Aggregation::min_margin;
};

/// Degree of compliance. Positive strictly inside the region, zero on its
/// boundary, negative outside.
inline double strategy_compliance(const Strategy& s, const ComplianceSpec& spec) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.intervals.size() && i < s.params.size(); ++i) {
    if (!spec.intervals[i]) continue;
    const auto& iv = *spec.intervals[i];
    const double w = i < s.domains.size() && s.domains[i].width() > 0 ? s.domains[i].width() : 1.0;
    const double m = std::min(s.params[i] - iv.lo, iv.hi - s.params[i]) / w;
    c = std::min(c, m);
  }
  if (std::isinf(c)) c = 1.0;
  if (spec.aggregation == Aggregation::binary) return c > 0 ? 1.0 : -1.0;
  return c;
}

inline bool is_compliant(const Strategy& s, const ComplianceSpec& spec) { return strategy_compliance(s, spec) > 0; }

enum class WeightScheme { role, player, node };

inline const char* to_string(WeightScheme w) {
  switch (w) {
    case WeightScheme::role: return "role";
    case WeightScheme::player: return "player";
    case WeightScheme::node: return "node";
  }
  return "?";
}

inline WeightScheme parse_weight_scheme(const std::string& s) {
  if (s == "role") return WeightScheme::role;
  if (s == "player") return WeightScheme::player;
  if (s == "node") return WeightScheme::node;
  throw ConfigError("unknown weighting scheme '" + s + "'");
}

/// Per-role weights for a scheme, normalized to sum to one.
inline std::vector<double> role_weights(const std::vector<RoleSpec>& roles, WeightScheme scheme) {
  std::vector<double> w;
  for (const auto& r : roles) {
    double v = 1.0;
    if (scheme == WeightScheme::player) v = r.player_count;
    if (scheme == WeightScheme::node) v = r.node_count;
    if (auto it = r.weight_overrides.find(to_string(scheme)); it != r.weight_overrides.end()) v = it->second;
    if (v < 0) throw ConfigError("negative weight for role " + r.name);
    w.push_back(v);
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (total <= 0) throw ConfigError("role weights sum to zero");
  for (double& v : w) v /= total;
  return w;
}

/// sum_r w_r sum_s q_r(s) c(s)
inline double profile_compliance(const EmpiricalGame& g, const MixedProfile& q, const ComplianceSpec& spec,
                                 const std::vector<double>& weights) {
  double c = 0.0;
  for (std::size_t r = 0; r < q.roles.size(); ++r)
    for (const auto& [s, p] : q.roles[r]) c += weights.at(r) * p * strategy_compliance(g.strategy(r, s), spec);
  return c;
}

/// Percentage of weight placed on compliant strategies.
inline double compliant_fraction(const EmpiricalGame& g, const MixedProfile& q, const ComplianceSpec& spec,
                                 WeightScheme scheme) {
  const auto w = role_weights(g.roles(), scheme);
  double f = 0.0;
  for (std::size_t r = 0; r < q.roles.size(); ++r)
    for (const auto& [s, p] : q.roles[r])
      if (is_compliant(g.strategy(r, s), spec)) f += w[r] * p;
  return 100.0 * f;
}

}  // namespace cegta
