#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "cegta/game.hpp"
#include "cegta/rng.hpp"

namespace cegta {

/// Anything that can play out a pure profile. Must be safe to call from
/// several threads at once. Returns one payoff per player slot, in canonical
/// slot order.
class ProfileOracle {
 public:
  virtual ~ProfileOracle() = default;
  virtual std::vector<double> simulate(const EmpiricalGame& game, const PureProfile& profile,
                                       std::uint64_t seed) const = 0;
};

/// Oracle backed by a plain function; handy for synthetic games.
class FunctionOracle : public ProfileOracle {
 public:
  using Fn = std::function<std::vector<double>(const EmpiricalGame&, const PureProfile&, std::uint64_t)>;
  explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}
  std::vector<double> simulate(const EmpiricalGame& g, const PureProfile& p, std::uint64_t seed) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return fn_(g, p, seed);
  }
  std::size_t calls() const { return calls_.load(); }

 private:
  Fn fn_;
  mutable std::atomic<std::size_t> calls_{0};
};

struct SchedulerOptions {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t master_seed = 1;
};

/// Brings profiles up to requested sample counts. Runs only the deficit,
/// executes runs on a worker pool, and appends results to the database in
/// request order so the log is independent of thread timing.
class Scheduler {
 public:
  using Observer = std::function<void(const Observation&)>;

  Scheduler(EmpiricalGame& game, const ProfileOracle& oracle, SchedulerOptions opt = {})
      : game_(game), oracle_(oracle), opt_(opt), run_counter_(game.db().size()) {}

  void set_observer(Observer obs) { observer_ = std::move(obs); }
  /// Cap on total runs executed by this scheduler (across requests).
  void set_run_limit(std::optional<std::size_t> limit) { limit_ = limit; }
  std::optional<std::size_t> run_limit() const { return limit_; }
  std::size_t runs_executed() const { return runs_; }
  const SchedulerOptions& options() const { return opt_; }

  /// Profiles formed by one player in Q switching to a strategy of S.
  static std::vector<PureProfile> deviations_of(const std::vector<PureProfile>& Q, const StrategySets& S) {
    std::set<PureProfile> out;
    for (const auto& p : Q) {
      for (std::size_t r = 0; r < S.size() && r < p.roles.size(); ++r) {
        const auto& slot = p.roles[r];
        for (std::size_t i = 0; i < slot.size(); ++i) {
          if (i > 0 && slot[i] == slot[i - 1]) continue;
          for (int s : S[r]) {
            if (s == slot[i]) continue;
            PureProfile d = p;
            d.roles[r][i] = s;
            d.canonicalize();
            out.insert(std::move(d));
          }
        }
      }
    }
    return {out.begin(), out.end()};
  }

  std::size_t schedule_deviation(const std::vector<PureProfile>& Q, const StrategySets& S, std::size_t n) {
    return schedule_profiles(deviations_of(Q, S), n);
  }

  std::size_t schedule_subgame(const StrategySets& S, std::size_t n) {
    std::vector<PureProfile> ps;
    for_each_profile(S, game_.player_counts(), [&](const PureProfile& p) { ps.push_back(p); });
    return schedule_profiles(ps, n);
  }

  /// Bring every profile in `ps` to at least `n` samples.
  std::size_t schedule_profiles(const std::vector<PureProfile>& ps, std::size_t n) {
    if (n < 1) throw ConfigError("sample request needs n >= 1");
    struct Job {
      PureProfile profile;
      std::uint64_t seed;
      std::vector<double> payoffs;
      std::exception_ptr error;
    };
    std::vector<Job> jobs;
    std::set<PureProfile> seen;
    for (const auto& p : ps) {
      if (!seen.insert(p).second) continue;
      game_.validate_profile(p);
      const std::size_t have = game_.samples(p);
      for (std::size_t k = have; k < n; ++k) jobs.push_back(Job{p, 0, {}, nullptr});
    }
    if (jobs.empty()) return 0;
    if (limit_ && runs_ + jobs.size() > *limit_)
      throw BudgetExhausted("request for " + std::to_string(jobs.size()) + " runs exceeds the run budget (" +
                            std::to_string(*limit_ - std::min(*limit_, runs_)) + " left)");
    const PureProfileHash hasher;
    for (auto& j : jobs) j.seed = mix_seed(opt_.master_seed, run_counter_++, hasher(j.profile));

    auto run_one = [&](Job& j) {
      for (int attempt = 0; attempt < 2; ++attempt) {
        try {
          j.payoffs = oracle_.simulate(game_, j.profile, j.seed);
          j.error = nullptr;
          return;
        } catch (...) {
          j.error = std::current_exception();
        }
      }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(opt_.workers, jobs.size()));
    if (workers == 1) {
      for (auto& j : jobs) run_one(j);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(jobs[i]);
        });
      for (auto& t : pool) t.join();
    }

    const Job* failed = nullptr;
    for (auto& j : jobs) {
      if (j.error) {
        if (!failed) failed = &j;
        continue;
      }
      game_.record_observation(j.profile, std::move(j.payoffs), j.seed);
      ++runs_;
      if (observer_) observer_(game_.db().log().back());
    }
    if (failed) {
      std::string what = "unknown error";
      try {
        std::rethrow_exception(failed->error);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      throw SimulationFailure(game_.profile_id(failed->profile), what);
    }
    return jobs.size();
  }

 private:
  EmpiricalGame& game_;
  const ProfileOracle& oracle_;
  SchedulerOptions opt_;
  std::uint64_t run_counter_;
  std::size_t runs_ = 0;
  std::optional<std::size_t> limit_;
  Observer observer_;
};

}  // namespace cegta
