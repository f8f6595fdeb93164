#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cegta/inner_loop.hpp"
#include "cegta/local_search.hpp"

namespace cegta {

struct OuterLoopConfig {
  std::size_t m = 5;
  std::size_t m_prime = 2;
  std::size_t minsamp = 5;
  std::size_t mincsamp = 10;
  /// Role indices in exploration order; empty means descending node count.
  std::vector<std::size_t> role_rotation;
  WeightScheme weights = WeightScheme::node;

  void validate() const {
    if (m_prime < 1 || m < m_prime) throw ConfigError("need m >= m' >= 1");
    if (minsamp < 1 || mincsamp < minsamp) throw ConfigError("need mincsamp >= minsamp >= 1");
  }
};

using SearchPair = std::pair<std::size_t, ComplianceMode>;

struct SolutionRecord {
  MixedProfile profile;
  double regret = 0.0;
  bool closed = false;
  std::set<SearchPair> tried;
  /// Grid points already explored against this solution, per (role, mode).
  std::map<SearchPair, std::set<GridKey>> explored;
};

enum class ExploreOutcome { added, failed, closed };

inline const char* to_string(ExploreOutcome o) {
  switch (o) {
    case ExploreOutcome::added: return "added";
    case ExploreOutcome::failed: return "failed";
    case ExploreOutcome::closed: return "closed";
  }
  return "?";
}

struct ExploreResult {
  ExploreOutcome outcome = ExploreOutcome::failed;
  /// Catalog index of the best explored strategy (-1 if none).
  int strategy = -1;
  double gain = 0.0;
  std::size_t rounds = 0;
  bool region_exhausted = false;
  /// Catalog indices generated by local search during this call.
  std::vector<int> generated;
};

/// Role-ρ payoff for deviating to s from q, i.e. u_ρ(s, q).
inline double deviation_payoff(const EmpiricalGame& g, const MixedProfile& q, std::size_t rho, int s) {
  return expected_payoff(g, q, rho, s);
}

/// The min(k, |cs|) strategies of `cs` with the highest deviation payoff
/// against q, best first. Ties keep catalog order.
inline std::vector<int> select_best_deviators(const EmpiricalGame& g, const MixedProfile& q, std::size_t rho,
                                              std::vector<int> cs, std::size_t k) {
  std::vector<std::pair<double, int>> scored;
  for (int s : cs) scored.emplace_back(deviation_payoff(g, q, rho, s), s);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
  return out;
}

/// Catalog index for a generated strategy, registering it outside C if new.
inline int register_generated(EmpiricalGame& g, std::size_t r, Strategy s) {
  if (auto found = g.find_by_params(r, s.params)) return *found;
  std::size_t seq = g.catalog_size(r);
  while (g.find_strategy(r, "x" + std::to_string(seq))) ++seq;
  s.id = "x" + std::to_string(seq);
  s.role = g.role(r).name;
  s.auto_generated = true;
  return g.add_strategy(std::move(s), false);
}

/// One invocation of the strategy-exploration outer loop for role ρ.
/// `iteration` numbers the label given to an added strategy.
inline ExploreResult explore(EmpiricalGame& g, SolutionRecord& sol, std::size_t rho, ComplianceMode mode,
                             const OuterLoopConfig& cfg, const ComplianceSpec& spec, Scheduler& sched,
                             std::size_t iteration) {
  cfg.validate();
  if (sol.closed) throw ConfigError("explore called on a closed solution");
  const auto& q = sol.profile;
  const auto Q = support_profiles(q, g.player_counts());
  const std::size_t R = g.role_count();
  auto only_rho = [&](std::vector<int> s) {
    StrategySets S(R);
    S[rho] = std::move(s);
    return S;
  };

  auto& memory = sol.explored[{rho, mode}];
  std::set<GridKey> explored = memory;
  for (int c : g.candidates(rho)) explored.insert(grid_key(g.strategy(rho, c)));

  std::vector<Strategy> seeds;
  for (int s : q.support(rho)) seeds.push_back(g.strategy(rho, s));

  ExploreResult res;
  double new_payoff = -std::numeric_limits<double>::infinity();
  while (true) {
    const double best_payoff = new_payoff;
    std::vector<Strategy> cand;
    try {
      cand = local_search(seeds, explored, mode, spec);
    } catch (const RegionExhausted&) {
      res.region_exhausted = true;
      break;
    }
    ++res.rounds;
    std::vector<int> idx;
    for (auto& c : cand) {
      const int i = register_generated(g, rho, std::move(c));
      idx.push_back(i);
      res.generated.push_back(i);
      const auto key = grid_key(g.strategy(rho, i));
      explored.insert(key);
      memory.insert(key);
    }
    sched.schedule_deviation(Q, only_rho(idx), cfg.minsamp);
    sched.schedule_deviation(Q, only_rho(select_best_deviators(g, q, rho, idx, cfg.m)), cfg.mincsamp);
    const auto top = select_best_deviators(g, q, rho, idx, cfg.m_prime);
    seeds.clear();
    new_payoff = -std::numeric_limits<double>::infinity();
    for (int s : top) {
      seeds.push_back(g.strategy(rho, s));
      new_payoff = std::max(new_payoff, deviation_payoff(g, q, rho, s));
    }
    if (new_payoff <= best_payoff) break;
  }

  // best of Explored \ C_rho
  std::vector<int> pool;
  for (const auto& key : memory) {
    for (std::size_t i = 0; i < g.catalog_size(rho); ++i) {
      if (grid_key(g.strategy(rho, static_cast<int>(i))) == key) {
        if (!g.is_candidate(rho, static_cast<int>(i))) pool.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  bool added = false;
  if (!pool.empty()) {
    sched.schedule_deviation(Q, only_rho(pool), cfg.minsamp);
    const int best = select_best_deviators(g, q, rho, pool, 1).front();
    sched.schedule_deviation(Q, only_rho({best}), cfg.mincsamp);
    res.strategy = best;
    res.gain = deviation_payoff(g, q, rho, best) - profile_payoff(g, q, rho);
    if (res.gain > 0) {
      auto& s = g.strategy(rho, best);
      s.label = (is_compliant(s, spec) ? "C" : "N") + std::to_string(iteration);
      g.add_candidate(rho, best);
      added = true;
    }
  }
  if (added) {
    res.outcome = ExploreOutcome::added;
    return res;
  }
  sol.tried.insert({rho, mode});
  sol.closed = sol.tried.size() >= 2 * R;
  res.outcome = sol.closed ? ExploreOutcome::closed : ExploreOutcome::failed;
  return res;
}

/// Most compliant open solution (non-compliant mode) or least compliant
/// (compliant mode); ties go to lower regret, then profile id. Solutions that
/// already tried `pair` are skipped when given. Returns -1 if none qualifies.
inline int select_target(const EmpiricalGame& g, const std::vector<SolutionRecord>& sols, ComplianceMode mode,
                         const ComplianceSpec& spec, const std::vector<double>& weights,
                         std::optional<SearchPair> pair = std::nullopt) {
  int best = -1;
  double best_c = 0.0;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const auto& s = sols[i];
    if (s.closed || (pair && s.tried.count(*pair))) continue;
    const double c = profile_compliance(g, s.profile, spec, weights);
    if (best < 0) {
      best = static_cast<int>(i);
      best_c = c;
      continue;
    }
    const auto& b = sols[static_cast<std::size_t>(best)];
    const bool better_c = mode == ComplianceMode::non_compliant ? c > best_c : c < best_c;
    bool take = better_c;
    if (!better_c && c == best_c) {
      if (s.regret != b.regret) take = s.regret < b.regret;
      else take = g.mixture_id(s.profile) < g.mixture_id(b.profile);
    }
    if (take) {
      best = static_cast<int>(i);
      best_c = c;
    }
  }
  return best;
}

/// Default rotation: roles by descending node count, stable on index.
inline std::vector<std::size_t> default_rotation(const EmpiricalGame& g) {
  std::vector<std::size_t> order(g.role_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g.role(a).node_count > g.role(b).node_count; });
  return order;
}

/// New solution list from the latest confirmed candidates. Records matching
/// an earlier solution (L-inf within `match_tol`) keep its status and memory.
inline std::vector<SolutionRecord> merge_solutions(const std::vector<Candidate>& confirmed,
                                                   const std::vector<SolutionRecord>& previous,
                                                   double match_tol = 1e-3) {
  std::vector<SolutionRecord> out;
  for (const auto& c : confirmed) {
    SolutionRecord rec;
    for (const auto& p : previous) {
      if (p.profile.roles.size() == c.mixture.roles.size() && p.profile.distance(c.mixture) <= match_tol) {
        rec = p;
        break;
      }
    }
    rec.profile = c.mixture;
    rec.regret = c.regret;
    out.push_back(std::move(rec));
  }
  return out;
}

struct SearchConfig {
  InnerLoopConfig inner;
  OuterLoopConfig outer;
  ComplianceSpec spec;
  std::size_t max_outer_iterations = std::numeric_limits<std::size_t>::max();
  std::optional<double> wall_budget_seconds;
};

struct ExploreEvent {
  std::size_t iteration = 0;
  std::size_t role = 0;
  ComplianceMode mode = ComplianceMode::non_compliant;
  std::string target;
  ExploreResult result;
};

struct SearchObserver {
  std::function<void(const ProgressRecord&)> inner_progress;
  std::function<void(const ExploreEvent&)> explored;
};

struct SearchResult {
  std::vector<SolutionRecord> solutions;
  std::size_t outer_iterations = 0;
  std::size_t inner_loops = 0;
  bool complete = false;
  /// "complete" or "open solutions remain"
  std::string status;
};

/// Alternate inner loop and strategy exploration until every solution is
/// closed or the iteration / wall budget runs out.
inline SearchResult compliance_search(EmpiricalGame& g, Scheduler& sched, const SearchConfig& cfg,
                                      const SearchObserver& obs = {}) {
  cfg.outer.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto rotation = cfg.outer.role_rotation.empty() ? default_rotation(g) : cfg.outer.role_rotation;
  for (auto r : rotation)
    if (r >= g.role_count()) throw ConfigError("role rotation names an unknown role index");
  const auto weights = role_weights(g.roles(), cfg.outer.weights);
  const std::size_t R = rotation.size();

  SearchResult res;
  auto inner = run_inner_loop(g, sched, cfg.inner, obs.inner_progress);
  ++res.inner_loops;
  res.solutions = merge_solutions(inner.confirmed(), {});

  std::size_t step = 0;
  while (true) {
    const bool all_closed =
        std::all_of(res.solutions.begin(), res.solutions.end(), [](const SolutionRecord& s) { return s.closed; });
    if (all_closed) {
      res.complete = true;
      break;
    }
    if (res.outer_iterations >= cfg.max_outer_iterations) break;
    if (cfg.wall_budget_seconds &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= *cfg.wall_budget_seconds)
      break;

    int target = -1;
    SearchPair pair{};
    for (std::size_t tries = 0; tries < 2 * R && target < 0; ++tries, ++step) {
      const std::size_t k = step % (2 * R);
      pair = {rotation[k % R], k < R ? ComplianceMode::non_compliant : ComplianceMode::compliant};
      target = select_target(g, res.solutions, pair.second, cfg.spec, weights, pair);
    }
    if (target < 0) {
      // every open solution has tried every pair; nothing left to do
      for (auto& s : res.solutions) s.closed = true;
      continue;
    }
    ++res.outer_iterations;
    auto& sol = res.solutions[static_cast<std::size_t>(target)];
    ExploreEvent ev{res.outer_iterations, pair.first, pair.second, g.mixture_id(sol.profile), {}};
    ev.result = explore(g, sol, pair.first, pair.second, cfg.outer, cfg.spec, sched, res.outer_iterations);
    if (obs.explored) obs.explored(ev);
    if (ev.result.outcome == ExploreOutcome::added) {
      inner = run_inner_loop(g, sched, cfg.inner, obs.inner_progress);
      ++res.inner_loops;
      res.solutions = merge_solutions(inner.confirmed(), res.solutions);
    }
  }
  res.status = res.complete ? "complete" : "open solutions remain";
  return res;
}

}  // namespace cegta
