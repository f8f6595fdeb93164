#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cegta/compliance.hpp"
#include "cegta/strategy.hpp"

namespace cegta::ibr {

enum class TargetSet { servers_only, clients_and_servers };

struct Probabilities {
  double attack = 0.05;
  double detect = 0.9;
  double success_undetected = 0.3;
  double false_positive = 0.001;
};

struct NetworkConfig {
  int n_roots = 3;
  int n_isps = 4;
  int clients_per_isp = 5;
  int n_attackers = 0;
  int n_rep_attackers = 0;
  std::int64_t horizon = 10000;
  TargetSet attack_targets = TargetSet::clients_and_servers;
  TargetSet rep_attack_targets = TargetSet::servers_only;
  Probabilities prob;
  int sleep_max = 39;
  int attacker_sleep_max = 9;
  /// One-way message transit time.
  int transit = 5;
  /// Time per introduction step.
  int intro_latency = 1;
  /// Per-hop delay of a feedback report.
  int report_latency = 1;
  /// Reputation half-life (time units); values decay toward zero.
  double reputation_half_life = 1000.0;
  /// Per-activation probability that a reputation attacker files a false report.
  double false_report_prob = 0.05;
  /// Expected client messages per run and the accepted band; recorded in the
  /// run manifest.
  double calibration_messages = 330.0;
  std::array<double, 2> calibration_band{250.0, 450.0};

  int n_clients() const { return clients_per_isp * n_isps; }
  int n_servers() const { return n_isps; }
  int n_honest() const { return n_roots + n_isps + n_clients() + n_servers(); }
  int n_total() const { return n_honest() + n_attackers + n_rep_attackers; }

  void validate() const {
    if (n_roots < 2) throw ConfigError("need at least 2 root introducers (got " + std::to_string(n_roots) + ")");
    if (n_isps < 1) throw ConfigError("need at least 1 ISP");
    if (clients_per_isp < 1) throw ConfigError("need at least 1 client per ISP");
    if (n_attackers < 0 || n_rep_attackers < 0) throw ConfigError("negative attacker count");
    if (horizon < 1) throw ConfigError("horizon must be positive");
    if (sleep_max < 0 || attacker_sleep_max < 0) throw ConfigError("negative sleep bound");
    if (transit < 0 || intro_latency < 0 || report_latency < 0) throw ConfigError("negative latency");
    if (!(reputation_half_life > 0)) throw ConfigError("reputation half-life must be positive");
    for (double p : {prob.attack, prob.detect, prob.success_undetected, prob.false_positive, false_report_prob})
      if (p < 0 || p > 1) throw ConfigError("probability outside [0, 1]");
  }
};

struct PayoffWeights {
  double v_msg = 3000;
  double v_recv = 100;
  double p_attack = 20000;
  double c_conn = 0.01;
  double c_intro = 50;
  double v_fee = 10;
  double p_liability = 2000;
};

inline constexpr std::size_t kParamCount = 7;

/// Node policy. Field order is the strategy parameter order.
struct PolicyParams {
  double rep_increment_positive = 0.0;
  double rep_decrement_negative = 0.0;
  double rep_decrement_report = 0.0;
  double intro_make_threshold = -1.0;
  double intro_accept_threshold = -1.0;
  double connection_terminate_threshold = -1.0;
  double report_propagation_weight = 0.0;

  std::vector<double> to_vector() const {
    return {rep_increment_positive,  rep_decrement_negative,         rep_decrement_report,     intro_make_threshold,
            intro_accept_threshold, connection_terminate_threshold, report_propagation_weight};
  }
  static PolicyParams from_vector(const std::vector<double>& v) {
    if (v.size() != kParamCount)
      throw ConfigError("IBR policy needs " + std::to_string(kParamCount) + " parameters, got " +
                        std::to_string(v.size()));
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }
};

inline ParamSpace policy_domains() {
  return {
      {"rep_increment_positive", 0.0, 0.2, 0.005},
      {"rep_decrement_negative", 0.0, 1.0, 0.05},
      {"rep_decrement_report", 0.0, 1.0, 0.05},
      {"intro_make_threshold", -1.0, 1.0, 0.05},
      {"intro_accept_threshold", -1.0, 1.0, 0.05},
      {"connection_terminate_threshold", -1.0, 1.0, 0.05},
      {"report_propagation_weight", 0.0, 1.0, 0.05},
  };
}

/// Designer-recommended policy.
inline PolicyParams default_compliant() { return {0.01, 0.5, 0.25, -0.2, -0.2, -0.3, 0.5}; }

/// Introduces and accepts indiscriminately and ignores feedback.
inline PolicyParams oblivious() { return {0.0, 0.0, 0.0, -1.0, -1.0, -1.0, 0.0}; }

inline ComplianceSpec ibr_compliance_spec() {
  const double inf = std::numeric_limits<double>::infinity();
  ComplianceSpec s;
  s.intervals = {
      ComplianceInterval{0.005, inf},  ComplianceInterval{0.15, inf},  ComplianceInterval{0.05, inf},
      ComplianceInterval{-0.6, 0.3},   ComplianceInterval{-0.6, 0.3},  ComplianceInterval{-0.9, -0.1},
      ComplianceInterval{0.1, inf},
  };
  return s;
}

inline Strategy make_policy_strategy(const std::string& role, const std::string& id, const PolicyParams& p,
                                     const std::string& label = {}) {
  Strategy s;
  s.role = role;
  s.id = id;
  s.params = p.to_vector();
  s.domains = policy_domains();
  s.label = label.empty() ? id : label;
  return s;
}

}  // namespace cegta::ibr
