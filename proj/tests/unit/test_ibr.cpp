#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace cegta;
using namespace cegta::ibr;
using namespace cegta::testing;

namespace {

NetworkConfig small(int attackers = 0, int rep = 0, std::int64_t horizon = 2000) {
  NetworkConfig c;
  c.n_roots = 3;
  c.n_isps = 4;
  c.clients_per_isp = 5;
  c.n_attackers = attackers;
  c.n_rep_attackers = rep;
  c.horizon = horizon;
  return c;
}

std::vector<PolicyParams> all(const NetworkConfig& c, const PolicyParams& p) {
  return std::vector<PolicyParams>(static_cast<std::size_t>(c.n_honest()), p);
}

SimOptions verify() {
  SimOptions o;
  o.verify_invariants = true;
  return o;
}

}  // namespace

TEST(Topology, NodeCounts) {
  NetworkConfig env2;
  env2.n_roots = 3;
  env2.n_isps = 18;
  env2.clients_per_isp = 33;
  EXPECT_EQ(env2.n_honest(), 633);
  NetworkConfig env1;
  env1.n_roots = 7;
  env1.n_isps = 49;
  env1.clients_per_isp = 99;
  EXPECT_EQ(env1.n_honest(), 4956);
  const auto t = build_topology(env2, 1);
  EXPECT_EQ(t.count_of(NodeKind::client), 594);
  EXPECT_EQ(t.count_of(NodeKind::server), 18);
}

TEST(Topology, MinimalNetworkForcedPair) {
  NetworkConfig c;
  c.n_roots = 2;
  c.n_isps = 1;
  c.clients_per_isp = 1;
  const auto t = build_topology(c, 9);
  EXPECT_EQ(t.n_nodes, 5);
  EXPECT_EQ(t.roots_of_isp(t.isp_begin), (std::pair<int, int>{0, 1}));
  EXPECT_TRUE(t.apriori(t.isp_begin, 0));
  EXPECT_TRUE(t.apriori(t.isp_begin, 1));
  EXPECT_TRUE(t.apriori(0, 1));
}

TEST(Topology, TooFewRoots) {
  NetworkConfig c;
  c.n_roots = 1;
  EXPECT_THROW(build_topology(c, 1), ConfigError);
}

TEST(Topology, RedundantTreeShapeProperty) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    NetworkConfig c;
    c.n_roots = uniform_int(rng, 2, 6);
    c.n_isps = uniform_int(rng, 1, 8);
    c.clients_per_isp = uniform_int(rng, 1, 6);
    c.n_attackers = uniform_int(rng, 0, 3);
    c.n_rep_attackers = uniform_int(rng, 0, 2);
    const auto t = build_topology(c, rng());
    for (int r = 0; r < c.n_roots; ++r)
      for (int o = 0; o < c.n_roots; ++o)
        if (o != r) EXPECT_TRUE(t.apriori(r, o));
    for (int i = 0; i < c.n_isps; ++i) {
      const auto [a, b] = t.roots_of_isp(t.isp_begin + i);
      EXPECT_NE(a, b);
      EXPECT_LT(b, c.n_roots);
    }
    for (int n = t.client_begin; n < t.n_nodes; ++n) {
      ASSERT_EQ(t.adjacent[static_cast<std::size_t>(n)].size(), 1u);
      EXPECT_EQ(t.kind[static_cast<std::size_t>(t.adjacent[static_cast<std::size_t>(n)][0])], NodeKind::isp);
    }
    for (int n = 0; n < t.n_nodes; ++n)
      for (int m : t.adjacent[static_cast<std::size_t>(n)]) EXPECT_TRUE(t.apriori(m, n));
  }
}

TEST(NodePayoff, Arithmetic) {
  PayoffWeights w;
  NodeStats s;
  EXPECT_DOUBLE_EQ(node_payoff(s, w), 0.0);
  PayoffWeights only_msg{100, 0, 0, 0, 0, 0, 0};
  s.delivered = 10;
  EXPECT_DOUBLE_EQ(node_payoff(s, only_msg), 1000.0);
  PayoffWeights only_attack{0, 0, 5000, 0, 0, 0, 0};
  NodeStats hit;
  hit.attacks_succeeded_against = 3;
  EXPECT_DOUBLE_EQ(node_payoff(hit, only_attack), -15000.0);
}

TEST(ComplianceSpecIbr, DefaultAndOblivious) {
  const auto spec = ibr_compliance_spec();
  const auto c = make_policy_strategy("client", "C", default_compliant());
  const auto n = make_policy_strategy("client", "N", oblivious());
  EXPECT_GT(strategy_compliance(c, spec), 0.0);
  EXPECT_LT(strategy_compliance(n, spec), 0.0);
  EXPECT_NO_THROW(c.validate());
  EXPECT_NO_THROW(n.validate());
  // one grid step below the accept band
  auto p = default_compliant();
  p.intro_accept_threshold = -0.65;
  const double borderline = strategy_compliance(make_policy_strategy("client", "B", p), spec);
  EXPECT_LT(borderline, 0.0);
  EXPECT_NEAR(borderline, -0.05 / 2.0, 1e-9);
}

TEST(Simulation, ZeroAttackersNoAttacks) {
  const auto c = small();
  const auto r = run_simulation(c, all(c, default_compliant()), 4, verify());
  EXPECT_EQ(r.agg.attacks_attempted, 0u);
  EXPECT_EQ(r.agg.attacks_succeeded, 0u);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_GT(r.agg.messages_generated, 0u);
  // every generated message is delivered, dropped as a false positive, or
  // still in flight at the horizon (at most one per client)
  const auto lost = r.agg.messages_generated - r.agg.messages_delivered - r.agg.false_positives;
  EXPECT_LE(lost, static_cast<std::uint64_t>(c.n_clients()));
  EXPECT_EQ(r.payoff.size(), static_cast<std::size_t>(c.n_honest()));
}

TEST(Simulation, DeterministicReplay) {
  const auto c = small(2, 1);
  const auto a = run_simulation(c, all(c, default_compliant()), 77);
  const auto b = run_simulation(c, all(c, default_compliant()), 77);
  EXPECT_EQ(a.trace_hash, b.trace_hash);
  EXPECT_EQ(a.payoff, b.payoff);
  const auto d = run_simulation(c, all(c, default_compliant()), 78);
  EXPECT_NE(a.trace_hash, d.trace_hash);
}

TEST(Simulation, PolicyCountMismatch) {
  const auto c = small();
  EXPECT_THROW(run_simulation(c, std::vector<PolicyParams>(3), 1), ConfigError);
}

TEST(Simulation, InvariantsUnderRandomPoliciesProperty) {
  Rng rng(101);
  const auto doms = policy_domains();
  for (int trial = 0; trial < 12; ++trial) {
    auto c = small(uniform_int(rng, 0, 4), uniform_int(rng, 0, 2), 800);
    std::vector<PolicyParams> pol;
    for (int i = 0; i < c.n_honest(); ++i) {
      std::vector<double> v;
      for (const auto& d : doms) v.push_back(d.at(uniform_int(rng, 0, static_cast<int>(d.steps()))));
      pol.push_back(PolicyParams::from_vector(v));
    }
    const auto r = run_simulation(c, pol, rng(), verify());
    EXPECT_TRUE(r.violations.empty()) << (r.violations.empty() ? "" : r.violations.front());
    EXPECT_EQ(r.agg.attacks_attempted, r.agg.attacks_detected + r.agg.attacks_undetected);
    EXPECT_LE(r.agg.attacks_succeeded, r.agg.attacks_undetected);
    EXPECT_EQ(r.chain_lengths[0], 0u);
  }
}

TEST(Simulation, AttackersAreTerminatedUnderCompliance) {
  const auto c = small(4, 0);
  std::uint64_t compliant = 0, oblivious_hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    compliant += run_simulation(c, all(c, default_compliant()), seed).agg.attacks_attempted;
    oblivious_hits += run_simulation(c, all(c, oblivious()), seed).agg.attacks_attempted;
  }
  EXPECT_LT(compliant, oblivious_hits);
}

TEST(Oracle, ExpandProfileAndReducedPayoffs) {
  const auto c = small();
  EmpiricalGame g(ibr_roles(c, {1, 1, 2, 1}));
  for (const char* r : {"root", "isp", "client", "server"}) {
    g.add_strategy(make_policy_strategy(r, "C", default_compliant()));
    g.add_strategy(make_policy_strategy(r, "N", oblivious()));
  }
  PureProfile p{{{0}, {1}, {0, 1}, {0}}};
  const auto pol = expand_profile(g, p, c);
  ASSERT_EQ(pol.size(), static_cast<std::size_t>(c.n_honest()));
  const int client0 = c.n_roots + c.n_isps;
  EXPECT_EQ(pol[static_cast<std::size_t>(client0)].to_vector(), default_compliant().to_vector());
  EXPECT_EQ(pol[static_cast<std::size_t>(client0 + 1)].to_vector(), oblivious().to_vector());
  EXPECT_EQ(pol[static_cast<std::size_t>(c.n_roots)].to_vector(), oblivious().to_vector());

  IbrOracle oracle(c);
  const auto out = oracle.simulate(g, p, 5);
  ASSERT_EQ(out.size(), 5u);
  const auto raw = run_simulation(c, pol, 5);
  double even = 0;
  for (int k = 0; k < c.n_clients(); k += 2) even += raw.payoff[static_cast<std::size_t>(client0 + k)];
  EXPECT_NEAR(out[2], even / (c.n_clients() / 2), 1e-9);
}

TEST(Oracle, RoleMismatchNamesRole) {
  const auto c = small();
  std::vector<RoleSpec> roles = ibr_roles(c, {1, 1, 2, 1});
  roles[2].node_count = 10;
  EmpiricalGame g(roles);
  for (const char* r : {"root", "isp", "client", "server"}) g.add_strategy(make_policy_strategy(r, "C", default_compliant()));
  try {
    expand_profile(g, PureProfile{{{0}, {0}, {0, 0}, {0}}}, c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("client"), std::string::npos);
  }
}
