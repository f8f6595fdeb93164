#pragma once

#include <stdexcept>
#include <string>

namespace cegta {

/// Invalid or inconsistent configuration (role counts, domains, files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing data (payoff vectors, node payoffs, log records).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A payoff was needed for a profile that has no samples.
class IncompleteData : public std::runtime_error {
 public:
  explicit IncompleteData(std::string profile)
      : std::runtime_error("incomplete data: profile " + profile + " is unevaluated"),
        profile_(std::move(profile)) {}
  const std::string& profile() const noexcept { return profile_; }

 private:
  std::string profile_;
};

/// The simulator failed twice on the same profile.
class SimulationFailure : public std::runtime_error {
 public:
  SimulationFailure(std::string profile, const std::string& what)
      : std::runtime_error("simulation failed for " + profile + ": " + what),
        profile_(std::move(profile)) {}
  const std::string& profile() const noexcept { return profile_; }

 private:
  std::string profile_;
};

/// Local search ran out of unexplored grid points of the requested polarity.
class RegionExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replicator dynamics found nothing on a fully evaluated game.
class NoSolutionFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request would exceed the configured simulation-run budget.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cegta
