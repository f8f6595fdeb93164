#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "cegta/regret.hpp"
#include "cegta/replicator.hpp"
#include "cegta/subgame.hpp"

namespace cegta {

enum class CandidateStatus { confirmed, unconfirmed, refuted };

inline const char* to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::confirmed: return "confirmed";
    case CandidateStatus::unconfirmed: return "unconfirmed";
    case CandidateStatus::refuted: return "refuted";
  }
  return "?";
}

struct Candidate {
  MixedProfile mixture;
  double regret = 0.0;
  CandidateStatus status = CandidateStatus::unconfirmed;
  /// Role and strategy of the best evaluated response (refuted candidates).
  std::size_t br_role = 0;
  int best_response = -1;
  /// Per-role best evaluated response and its gain over q.
  std::vector<int> role_best;
  std::vector<double> role_gain;
  /// The maximal complete subgame it was found in.
  Subgame subgame;
};

struct CandidateSet {
  std::vector<Candidate> confirmed;    // X_C
  std::vector<Candidate> unconfirmed;  // X_U
  std::vector<Candidate> refuted;      // X_R
  std::vector<Subgame> subgames;

  std::size_t size() const { return confirmed.size() + unconfirmed.size() + refuted.size(); }
};

struct AnalysisOptions {
  ReplicatorOptions replicator;
  SubgameAlgorithm subgame_algorithm = SubgameAlgorithm::automatic;
};

/// Classify q against the whole candidate space C.
inline Candidate classify(const EmpiricalGame& g, const MixedProfile& q, double tau, Subgame origin = {}) {
  const auto rr = regret(g, q, g.candidate_sets());
  Candidate c;
  c.mixture = q;
  c.regret = rr.regret;
  c.br_role = rr.best_role;
  c.best_response = rr.best_strategy();
  c.role_best = rr.best_response;
  c.role_gain = rr.role_gain;
  c.subgame = std::move(origin);
  if (rr.max_gain > tau) c.status = CandidateStatus::refuted;
  else if (rr.fully_evaluated) c.status = CandidateStatus::confirmed;
  else c.status = CandidateStatus::unconfirmed;
  return c;
}

/// Equilibria of every maximal complete subgame, classified as confirmed,
/// unconfirmed or refuted relative to C. Near-identical mixtures are merged,
/// keeping the lower-regret one.
inline CandidateSet game_analysis(const EmpiricalGame& g, double tau, const AnalysisOptions& opt = {}) {
  CandidateSet out;
  out.subgames = maximal_complete_subgames(g, opt.subgame_algorithm);
  auto rd = opt.replicator;
  rd.tol = std::max(rd.tol, tau);
  std::vector<Candidate> all;
  for (const auto& sg : out.subgames) {
    for (auto& [q, eps] : replicator_dynamics(sg, g, rd)) {
      auto c = classify(g, q, tau, sg);
      bool merged = false;
      for (auto& other : all) {
        if (other.mixture.distance(c.mixture) <= rd.dedup_tol) {
          if (c.regret < other.regret) other = c;
          merged = true;
          break;
        }
      }
      if (!merged) all.push_back(std::move(c));
    }
  }
  std::stable_sort(all.begin(), all.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.regret != b.regret) return a.regret < b.regret;
    return g.mixture_id(a.mixture) < g.mixture_id(b.mixture);
  });
  for (auto& c : all) {
    switch (c.status) {
      case CandidateStatus::confirmed: out.confirmed.push_back(std::move(c)); break;
      case CandidateStatus::unconfirmed: out.unconfirmed.push_back(std::move(c)); break;
      case CandidateStatus::refuted: out.refuted.push_back(std::move(c)); break;
    }
  }
  return out;
}

}  // namespace cegta
