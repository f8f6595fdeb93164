#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "cegta/errors.hpp"
#include "cegta/profile.hpp"

namespace cegta {

/// One simulation result: per-slot payoffs in canonical slot order.
struct Observation {
  PureProfile profile;
  std::vector<double> payoffs;
  std::uint64_t seed = 0;
  std::int64_t timestamp = 0;
};

struct ProfileStats {
  std::size_t count = 0;
  std::vector<double> mean;
};

/// Append-only observation log plus a derived per-profile index holding the
/// sample count and running mean of every payoff slot.
///
/// Appends are serialised; readers take a shared lock. The index is always
/// reproducible from the log by replaying it in order.
class PayoffDatabase {
 public:
  PayoffDatabase() = default;
  PayoffDatabase(const PayoffDatabase& o) {
    std::shared_lock lock(o.mu_);
    log_ = o.log_;
    index_ = o.index_;
  }
  PayoffDatabase& operator=(const PayoffDatabase& o) {
    if (this == &o) return *this;
    PayoffDatabase tmp(o);
    std::unique_lock lock(mu_);
    log_ = std::move(tmp.log_);
    index_ = std::move(tmp.index_);
    return *this;
  }

  void append(Observation obs) {
    if (!obs.profile.canonical()) throw DataError("observation profile is not canonical");
    std::unique_lock lock(mu_);
    auto& st = index_[obs.profile];
    if (st.count == 0) {
      st.mean.assign(obs.payoffs.size(), 0.0);
    } else if (st.mean.size() != obs.payoffs.size()) {
      throw DataError("payoff vector length changed for an existing profile");
    }
    ++st.count;
    const double n = static_cast<double>(st.count);
    for (std::size_t i = 0; i < obs.payoffs.size(); ++i) st.mean[i] += (obs.payoffs[i] - st.mean[i]) / n;
    log_.push_back(std::move(obs));
  }

  std::size_t count(const PureProfile& p) const {
    std::shared_lock lock(mu_);
    auto it = index_.find(p);
    return it == index_.end() ? 0 : it->second.count;
  }

  std::optional<ProfileStats> stats(const PureProfile& p) const {
    std::shared_lock lock(mu_);
    auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Mean of slot `slot` for profile `p`, if evaluated.
  std::optional<double> slot_mean(const PureProfile& p, std::size_t slot) const {
    std::shared_lock lock(mu_);
    auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second.mean.at(slot);
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return log_.size();
  }
  std::size_t profile_count() const {
    std::shared_lock lock(mu_);
    return index_.size();
  }

  std::vector<Observation> log() const {
    std::shared_lock lock(mu_);
    return log_;
  }
  std::vector<PureProfile> profiles() const {
    std::shared_lock lock(mu_);
    std::vector<PureProfile> out;
    out.reserve(index_.size());
    for (const auto& [p, st] : index_) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
  }

  static PayoffDatabase replay(const std::vector<Observation>& log) {
    PayoffDatabase db;
    for (const auto& o : log) db.append(o);
    return db;
  }

 private:
  mutable std::shared_mutex mu_;
  std::vector<Observation> log_;
  std::unordered_map<PureProfile, ProfileStats, PureProfileHash> index_;
};

}  // namespace cegta
