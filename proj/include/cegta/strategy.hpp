#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cegta/errors.hpp"

namespace cegta {

/// A role of the reduced game: `player_count` players standing in for
/// `node_count` network nodes.
struct RoleSpec {
  std::string name;
  int player_count = 1;
  int node_count = 1;
  /// Optional weight per compliance weighting scheme ("role", "player", "node").
  std::map<std::string, double> weight_overrides;

  void validate() const {
    if (name.empty()) throw ConfigError("role with empty name");
    if (player_count < 1) throw ConfigError("role " + name + ": player_count must be >= 1");
    if (node_count < player_count)
      throw ConfigError("role " + name + ": node_count must be >= player_count");
    if (node_count % player_count != 0)
      throw ConfigError("role " + name + ": node_count " + std::to_string(node_count) +
                        " is not divisible by player_count " + std::to_string(player_count));
  }
};

/// Closed interval [lo, hi] discretised by `step`.
struct ParamDomain {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.1;

  void validate() const {
    if (!(hi >= lo)) throw ConfigError("parameter " + name + ": hi < lo");
    if (!(step > 0.0)) throw ConfigError("parameter " + name + ": step must be positive");
  }
  bool contains(double v) const { return v >= lo - 1e-12 && v <= hi + 1e-12; }
  /// Number of grid increments spanning the domain (rounded up).
  long steps() const { return static_cast<long>(std::ceil((hi - lo) / step - 1e-9)); }
  long index_of(double v) const { return std::lround((v - lo) / step); }
  /// Grid value at `idx`, clipped to the domain.
  double at(long idx) const {
    if (idx <= 0) return lo;
    if (idx >= steps()) return hi;
    return lo + static_cast<double>(idx) * step;
  }
  double snap(double v) const { return at(index_of(v)); }
  double width() const { return hi - lo; }
};

using ParamSpace = std::vector<ParamDomain>;

/// A point in a role's policy-parameter space.
struct Strategy {
  std::string role;
  std::string id;
  std::vector<double> params;
  ParamSpace domains;
  std::string label;
  bool auto_generated = false;

  void validate() const {
    if (id.empty()) throw ConfigError("strategy with empty id in role " + role);
    if (params.size() != domains.size())
      throw ConfigError("strategy " + id + ": " + std::to_string(params.size()) +
                        " params for " + std::to_string(domains.size()) + " domains");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!domains[i].contains(params[i]))
        throw ConfigError("strategy " + id + ": parameter " + domains[i].name + " = " +
                          std::to_string(params[i]) + " outside its domain");
    }
  }
};

}  // namespace cegta
