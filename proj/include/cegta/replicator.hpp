#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "cegta/subgame.hpp"

namespace cegta {

struct ReplicatorOptions {
  int restarts = 20;
  int max_iters = 10000;
  /// Within-subgame regret bound for accepting a fixed point.
  double tol = 1e-6;
  double min_support = 0.01;
  double converge_tol = 1e-13;
  double dedup_tol = 1e-3;
  std::uint64_t seed = 0x5eed;
};

/// Dense payoff table for a complete subgame, laid out for fast evaluation
/// of deviation payoffs under a role-symmetric mixture.
class SubgameTable {
 public:
  using Mix = std::vector<std::vector<double>>;

  SubgameTable(const EmpiricalGame& g, Subgame sg) : subgame_(std::move(sg)) {
    const auto sizes = g.player_counts();
    const std::size_t R = subgame_.size();
    min_payoff_.assign(R, std::numeric_limits<double>::infinity());
    max_payoff_.assign(R, -std::numeric_limits<double>::infinity());
    for_each_profile(subgame_, sizes, [&](const PureProfile& p) {
      auto st = g.db().stats(p);
      if (!st) throw IncompleteData(g.profile_id(p));
      Entry e;
      e.counts.resize(R);
      for (std::size_t r = 0; r < R; ++r) {
        e.counts[r].assign(subgame_[r].size(), 0);
        for (int s : p.roles[r]) ++e.counts[r][local(r, s)];
      }
      for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t i = 0; i < subgame_[r].size(); ++i) {
          if (e.counts[r][i] == 0) continue;
          Term t;
          t.role = r;
          t.local = i;
          t.payoff = *g.payoff(p, r, subgame_[r][i]);
          t.coef = 1.0;
          for (std::size_t r2 = 0; r2 < R; ++r2) {
            auto c = e.counts[r2];
            if (r2 == r) --c[i];
            t.coef *= multinomial(c);
          }
          min_payoff_[r] = std::min(min_payoff_[r], t.payoff);
          max_payoff_[r] = std::max(max_payoff_[r], t.payoff);
          e.terms.push_back(t);
        }
      }
      entries_.push_back(std::move(e));
    });
  }

  const Subgame& subgame() const { return subgame_; }
  double min_payoff(std::size_t r) const { return min_payoff_[r]; }
  double max_payoff(std::size_t r) const { return max_payoff_[r]; }

  std::size_t local(std::size_t r, int s) const {
    const auto& v = subgame_[r];
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  }

  /// Per role and local strategy, the expected payoff of a single deviator.
  Mix deviation_payoffs(const Mix& x) const {
    Mix dev(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) dev[r].assign(x[r].size(), 0.0);
    for (const auto& e : entries_) {
      double full = 1.0;
      for (std::size_t r = 0; r < x.size(); ++r)
        for (std::size_t i = 0; i < x[r].size(); ++i) full *= ipow(x[r][i], e.counts[r][i]);
      for (const auto& t : e.terms) {
        const double xi = x[t.role][t.local];
        double prob;
        if (xi > 0.0) {
          prob = full / xi;
        } else {
          prob = 1.0;
          for (std::size_t r = 0; r < x.size(); ++r)
            for (std::size_t i = 0; i < x[r].size(); ++i)
              prob *= ipow(x[r][i], e.counts[r][i] - ((r == t.role && i == t.local) ? 1 : 0));
        }
        dev[t.role][t.local] += t.coef * prob * t.payoff;
      }
    }
    return dev;
  }

  /// Regret of x restricted to the subgame.
  double regret(const Mix& x) const {
    const auto dev = deviation_payoffs(x);
    double eps = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) {
      double uq = 0.0, best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < x[r].size(); ++i) {
        uq += x[r][i] * dev[r][i];
        best = std::max(best, dev[r][i]);
      }
      eps = std::max(eps, best - uq);
    }
    return eps;
  }

  Mix to_local(const MixedProfile& q) const {
    Mix x(subgame_.size());
    for (std::size_t r = 0; r < subgame_.size(); ++r) {
      x[r].assign(subgame_[r].size(), 0.0);
      for (const auto& [s, p] : q.roles[r]) x[r][local(r, s)] = p;
    }
    return x;
  }
  MixedProfile to_mixed(const Mix& x) const {
    MixedProfile q;
    q.roles.resize(subgame_.size());
    for (std::size_t r = 0; r < subgame_.size(); ++r)
      for (std::size_t i = 0; i < x[r].size(); ++i)
        if (x[r][i] > 0.0) q.roles[r][subgame_[r][i]] = x[r][i];
    return q;
  }

 private:
  struct Term {
    std::size_t role = 0;
    std::size_t local = 0;
    double coef = 1.0;
    double payoff = 0.0;
  };
  struct Entry {
    std::vector<std::vector<int>> counts;
    std::vector<Term> terms;
  };

  static double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
  }

  Subgame subgame_;
  std::vector<Entry> entries_;
  std::vector<double> min_payoff_;
  std::vector<double> max_payoff_;
};

/// One run of discrete-time replicator dynamics from `x`. Payoffs are shifted
/// per role by the table minimum so every fitness is nonnegative.
inline SubgameTable::Mix replicate(const SubgameTable& table, SubgameTable::Mix x, int max_iters, double converge_tol) {
  const std::size_t R = x.size();
  std::vector<double> shift(R);
  for (std::size_t r = 0; r < R; ++r) {
    const double range = table.max_payoff(r) - table.min_payoff(r);
    shift[r] = table.min_payoff(r) - 1e-12 * std::max(1.0, range);
  }
  for (int it = 0; it < max_iters; ++it) {
    const auto dev = table.deviation_payoffs(x);
    double delta = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      double denom = 0.0;
      for (std::size_t i = 0; i < x[r].size(); ++i) denom += x[r][i] * (dev[r][i] - shift[r]);
      if (!(denom > 0.0)) continue;
      for (std::size_t i = 0; i < x[r].size(); ++i) {
        const double nx = x[r][i] * (dev[r][i] - shift[r]) / denom;
        delta = std::max(delta, std::abs(nx - x[r][i]));
        x[r][i] = nx;
      }
    }
    if (delta < converge_tol) break;
  }
  return x;
}

/// Candidate equilibria of a complete subgame: one uniform start plus
/// (restarts - 1) uniform-simplex draws. Low-probability strategies are
/// pruned before the final regret check. May return nothing.
inline std::vector<std::pair<MixedProfile, double>> replicator_dynamics(const Subgame& sg, const EmpiricalGame& g,
                                                                        const ReplicatorOptions& opt = {}) {
  const SubgameTable table(g, sg);
  std::mt19937_64 rng(opt.seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<std::pair<MixedProfile, double>> found;
  for (int start = 0; start < std::max(1, opt.restarts); ++start) {
    SubgameTable::Mix x(sg.size());
    for (std::size_t r = 0; r < sg.size(); ++r) {
      x[r].assign(sg[r].size(), 1.0 / static_cast<double>(sg[r].size()));
      if (start > 0) {
        double total = 0.0;
        for (auto& v : x[r]) total += (v = expo(rng));
        for (auto& v : x[r]) v /= total;
      }
    }
    x = replicate(table, std::move(x), opt.max_iters, opt.converge_tol);
    MixedProfile q = table.to_mixed(x).pruned(opt.min_support);
    const double eps = table.regret(table.to_local(q));
    if (!(eps <= opt.tol)) continue;
    bool merged = false;
    for (auto& [other, other_eps] : found) {
      if (other.distance(q) <= opt.dedup_tol) {
        if (eps < other_eps) {
          other = q;
          other_eps = eps;
        }
        merged = true;
        break;
      }
    }
    if (!merged) found.emplace_back(std::move(q), eps);
  }
  return found;
}

}  // namespace cegta
