#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "cegta/analysis.hpp"
#include "cegta/scheduler.hpp"

namespace cegta {

struct InnerLoopConfig {
  double tau = 0.0;
  std::size_t minsamp = 1;
  std::size_t mincsamp = 2;
  /// Simulation runs allowed per invocation.
  std::size_t max_profile_budget = 50000;
  AnalysisOptions analysis;
  /// Randomizes the incr_subgame tie-break when set.
  std::optional<std::uint64_t> incr_seed;

  void validate() const {
    if (tau < 0) throw ConfigError("tau must be >= 0");
    if (minsamp < 1) throw ConfigError("minsamp must be >= 1");
    if (mincsamp <= minsamp) throw ConfigError("mincsamp must exceed minsamp");
  }
};

struct ProgressRecord {
  std::size_t iteration = 0;
  std::size_t confirmed = 0, unconfirmed = 0, refuted = 0;
  std::size_t profiles_evaluated = 0;
  std::size_t sims_run = 0;
};

/// Budget ran out mid-loop; carries the last analysis.
class InnerLoopBudgetError : public BudgetExhausted {
 public:
  InnerLoopBudgetError(const std::string& what, CandidateSet partial)
      : BudgetExhausted(what), partial_(std::move(partial)) {}
  const CandidateSet& partial() const { return partial_; }

 private:
  CandidateSet partial_;
};

/// Smallest incomplete subgame extending a maximal complete subgame by one
/// strategy. Ties go to the lexicographically smallest key unless seeded.
inline Subgame incr_subgame(const EmpiricalGame& g, const std::set<Subgame>& explored,
                            std::optional<std::uint64_t> seed = std::nullopt,
                            SubgameAlgorithm algo = SubgameAlgorithm::automatic) {
  const auto C = g.candidate_sets();
  if (is_complete(g, C)) throw ConfigError("incr_subgame: the full game is already complete");
  const auto maxes = maximal_complete_subgames(g, algo);
  if (maxes.empty()) {
    Subgame s(C.size());
    for (std::size_t r = 0; r < C.size(); ++r) s[r] = {C[r].front()};
    return s;
  }
  std::set<Subgame> ext;
  for (const auto& m : maxes)
    for (std::size_t r = 0; r < C.size(); ++r)
      for (int s : C[r])
        if (!std::binary_search(m[r].begin(), m[r].end(), s)) ext.insert(subgame_with(m, r, s));

  std::vector<Subgame> pool;
  for (bool allow_explored : {false, true}) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& s : ext) {
      if (!allow_explored && explored.count(s)) continue;
      const auto n = subgame_size(s);
      if (n < best) {
        best = n;
        pool.clear();
      }
      if (n == best) pool.push_back(s);
    }
    if (!pool.empty()) break;
  }
  if (pool.empty()) throw ConfigError("incr_subgame: no extension available");
  if (seed) {
    std::mt19937_64 rng(*seed ^ explored.size());
    std::sort(pool.begin(), pool.end());
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  }
  return *std::min_element(pool.begin(), pool.end(), [&](const Subgame& a, const Subgame& b) {
    return subgame_key(g, a) < subgame_key(g, b);
  });
}

struct InnerLoopResult {
  CandidateSet analysis;
  std::size_t iterations = 0;
  std::size_t sims_run = 0;

  const std::vector<Candidate>& confirmed() const { return analysis.confirmed; }
};

/// Simulate/analyze until every candidate is confirmed or refuted and at
/// least one confirmed candidate has its support sampled at mincsamp.
inline InnerLoopResult run_inner_loop(EmpiricalGame& g, Scheduler& sched, const InnerLoopConfig& cfg,
                                      const std::function<void(const ProgressRecord&)>& progress = {}) {
  cfg.validate();
  for (std::size_t r = 0; r < g.role_count(); ++r)
    if (g.candidates(r).empty()) throw ConfigError("role '" + g.role(r).name + "' has no strategies");

  const auto saved_limit = sched.run_limit();
  const std::size_t start = sched.runs_executed();
  std::size_t cap = start + cfg.max_profile_budget;
  if (saved_limit) cap = std::min(cap, *saved_limit);
  sched.set_run_limit(cap);
  struct Restore {
    Scheduler& s;
    std::optional<std::size_t> v;
    ~Restore() { s.set_run_limit(v); }
  } restore{sched, saved_limit};

  InnerLoopResult res;
  std::set<Subgame> explored;
  const auto sizes = g.player_counts();
  try {
    while (true) {
      ++res.iterations;
      res.analysis = game_analysis(g, cfg.tau, cfg.analysis);
      const auto& X = res.analysis;
      res.sims_run = sched.runs_executed() - start;
      if (progress)
        progress({res.iterations, X.confirmed.size(), X.unconfirmed.size(), X.refuted.size(),
                  g.db().profile_count(), res.sims_run});

      if (!X.unconfirmed.empty()) {
        std::size_t ran = 0;
        const auto C = g.candidate_sets();
        for (const auto& q : X.unconfirmed) {
          const auto in_q = strategies_in(q.mixture);
          StrategySets rest(C.size());
          for (std::size_t r = 0; r < C.size(); ++r)
            std::set_difference(C[r].begin(), C[r].end(), in_q[r].begin(), in_q[r].end(),
                                std::back_inserter(rest[r]));
          ran += sched.schedule_deviation(support_profiles(q.mixture, sizes), rest, cfg.minsamp);
        }
        if (ran > 0) continue;
      }

      if (!X.confirmed.empty()) {
        std::size_t ran = 0;
        for (const auto& q : X.confirmed) ran += sched.schedule_subgame(strategies_in(q.mixture), cfg.mincsamp);
        if (ran == 0) return res;
        continue;
      }

      bool scheduled = false;
      for (const auto& q : X.refuted) {
        auto sg = strategies_in(q.mixture);
        for (std::size_t r = 0; r < sg.size(); ++r)
          if (q.role_gain[r] > cfg.tau && q.role_best[r] >= 0) sg = subgame_with(sg, r, q.role_best[r]);
        if (explored.count(sg)) continue;
        explored.insert(sg);
        if (is_complete(g, sg)) continue;
        sched.schedule_subgame(sg, cfg.mincsamp);
        scheduled = true;
        break;
      }
      if (scheduled) continue;

      if (is_complete(g, g.candidate_sets()))
        throw NoSolutionFound("no equilibrium candidate survives on the fully evaluated game");
      auto sg = incr_subgame(g, explored, cfg.incr_seed, cfg.analysis.subgame_algorithm);
      explored.insert(sg);
      sched.schedule_subgame(sg, cfg.minsamp);
    }
  } catch (const BudgetExhausted& e) {
    throw InnerLoopBudgetError(std::string("inner loop budget exhausted: ") + e.what(), res.analysis);
  }
}

}  // namespace cegta
