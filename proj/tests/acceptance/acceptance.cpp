// Acceptance run: one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "cegta/commands.hpp"
#include "support/oracles.hpp"

using namespace cegta;
using namespace cegta::testing;
namespace fs = std::filesystem;
using io::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Paths {
  fs::path configs;
  fs::path work;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

PureProfile pp(std::vector<std::vector<int>> roles) { return PureProfile{std::move(roles)}.canonicalize(); }

ibr::NetworkConfig scaled_down(int attackers, int rep_attackers) {
  ibr::NetworkConfig c;
  c.n_roots = 3;
  c.n_isps = 4;
  c.clients_per_isp = 5;
  c.horizon = 2000;
  c.n_attackers = attackers;
  c.n_rep_attackers = rep_attackers;
  return c;
}

// 1 ------------------------------------------------------------------------
Verdict regret_oracle() {
  Rng rng(1001);
  int bad = 0;
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto rg = random_game(rng, 3, 3, 4);
    evaluate_all(rg);
    const auto q = random_mixture(rng, rg.game);
    const auto got = regret(rg.game, q, rg.game.candidate_sets());
    const auto want = brute_regret(rg.game, q);
    bool ok = got.fully_evaluated && std::abs(got.regret - want.regret) <= 1e-9;
    worst = std::max(worst, std::abs(got.regret - want.regret));
    for (std::size_t r = 0; ok && r < rg.game.role_count(); ++r) {
      ok = std::abs(got.role_gain[r] - want.role_gain[r]) <= 1e-9;
      if (got.best_response[r] != want.best_response[r]) {
        // only a float-level tie may pick a different strategy
        const double a = brute_expected_payoff(rg.game, q, r, got.best_response[r]);
        const double b = brute_expected_payoff(rg.game, q, r, want.best_response[r]);
        ok = ok && std::abs(a - b) <= 1e-9;
      }
    }
    bad += !ok;
  }
  return {bad == 0, fmt("%.0f/200 mismatches, max |regret diff| %.2e", bad, worst)};
}

// 2 ------------------------------------------------------------------------
Verdict subgame_oracle() {
  Rng rng(2002);
  int bad = 0;
  std::size_t found = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto rg = random_game(rng, 3, 3, 4);
    const double density = uniform(rng, 0.2, 1.0);
    for (const auto& p : all_profiles_brute(rg.game, rg.game.candidate_sets()))
      if (uniform(rng, 0, 1) < density) evaluate(rg, p);
    const auto want = brute_maximal(rg.game);
    found += want.size();
    bad += maximal_complete_subgames(rg.game) != want;
  }
  return {bad == 0, fmt("%.0f/200 mismatches, %.0f maximal subgames checked", bad, static_cast<double>(found))};
}

// 3 ------------------------------------------------------------------------
Verdict footnote() {
  auto g = footnote_game();
  auto oracle = footnote_oracle();
  Scheduler sched(g, oracle, {1, 3});
  const auto abc = pp({{0, 1, 2}});
  for (const auto& p : all_profiles_brute(g, g.candidate_sets()))
    if (p != abc) sched.schedule_profiles({p}, 1);

  const auto X = game_analysis(g, 1e-6);
  // (A,A,A) refuted by C, (B,B,B) by A, (C,C,C) by B
  const int by[3] = {2, 0, 1};
  int refutations = 0;
  for (const auto& c : X.refuted)
    for (int s = 0; s < 3; ++s)
      if (c.mixture.is_pure() && c.mixture.prob(0, s) == 1.0 && c.best_response == by[s]) ++refutations;
  if (refutations != 3 || !X.confirmed.empty())
    return {false, fmt("%.0f of 3 expected refutations", refutations)};

  InnerLoopConfig cfg;
  cfg.tau = 1e-6;
  cfg.minsamp = 1;
  cfg.mincsamp = 2;
  const auto res = run_inner_loop(g, sched, cfg);
  bool full = false;
  double eps = 1;
  for (const auto& c : res.confirmed())
    if (c.mixture.support(0).size() == 3) {
      full = true;
      eps = std::max(c.regret, brute_regret(g, c.mixture).regret);
    }
  return {g.evaluated(abc) && full && eps <= 1e-6,
          fmt("(A,B,C) evaluated=%.0f, full-support confirmed=%.0f, eps=%.2e", g.evaluated(abc), full, eps)};
}

// 4 ------------------------------------------------------------------------
EmpiricalGame symmetric_matrix(const std::vector<std::vector<double>>& u, std::vector<std::string> ids) {
  EmpiricalGame g({RoleSpec{"all", 2, 2, {}}});
  for (const auto& id : ids) g.add_strategy(plain("all", id));
  const int k = static_cast<int>(ids.size());
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b)
      g.record_observation(pp({{a, b}}),
                           {u[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                            u[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]},
                           0, 0);
  return g;
}

Verdict replicator() {
  auto rps = symmetric_matrix({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}, {"R", "P", "S"});
  const auto a = replicator_dynamics(rps.candidate_sets(), rps, {});
  double linf = 1, eps_rps = 1;
  if (!a.empty()) {
    linf = 0;
    for (int s = 0; s < 3; ++s) linf = std::max(linf, std::abs(a.front().first.prob(0, s) - 1.0 / 3));
    eps_rps = brute_regret(rps, a.front().first).regret;
  }
  auto dom = symmetric_matrix({{3, 0}, {5, 1}}, {"C", "D"});
  const auto b = replicator_dynamics(dom.candidate_sets(), dom, {});
  bool dominant = !b.empty();
  double eps_dom = 0;
  for (const auto& [q, e] : b) {
    dominant = dominant && q.is_pure() && q.prob(0, 1) == 1.0;
    eps_dom = std::max(eps_dom, brute_regret(dom, q).regret);
  }
  return {linf <= 1e-4 && eps_rps <= 1e-6 && dominant && eps_dom <= 1e-6,
          fmt("RPS L_inf %.2e eps %.2e; dominant pure=%.0f eps %.2e", linf, eps_rps, dominant, eps_dom)};
}

// 5 ------------------------------------------------------------------------
Verdict compliance_arithmetic() {
  // env 3: 5 roots (1 player), 30 ISPs (2), 1980 clients (2), 30 servers (1)
  const std::vector<RoleSpec> roles{{"root", 1, 5, {}}, {"isp", 2, 30, {}}, {"client", 2, 1980, {}}, {"server", 1, 30, {}}};
  EmpiricalGame g(roles);
  for (const auto& r : roles)
    for (double v : {1.0, 0.0}) {
      Strategy s;
      s.role = r.name;
      s.id = v > 0 ? "C" : "N";
      s.params = {v};
      s.domains = {ParamDomain{"flag", 0, 1, 1}};
      g.add_strategy(s);
    }
  ComplianceSpec spec;
  spec.intervals = {ComplianceInterval{0.5, std::numeric_limits<double>::infinity()}};
  spec.aggregation = Aggregation::binary;
  MixedProfile q;
  q.roles = {{{1, 1.0}}, {{1, 1.0}}, {{0, 1.0}}, {{1, 1.0}}};
  auto round1 = [](double v) { return std::round(v * 10) / 10; };
  const double role = round1(compliant_fraction(g, q, spec, WeightScheme::role));
  const double player = round1(compliant_fraction(g, q, spec, WeightScheme::player));
  const double node = round1(compliant_fraction(g, q, spec, WeightScheme::node));
  return {role == 25.0 && player == 33.3 && node == 96.8, fmt("role %.1f%%, player %.1f%%, node %.1f%%", role, player, node)};
}

// 6 ------------------------------------------------------------------------
Verdict hill_climbing() {
  OuterLoopConfig outer;
  outer.m = 5;
  outer.m_prime = 2;
  outer.minsamp = 5;
  outer.mincsamp = 10;
  InnerLoopConfig inner;
  inner.tau = 0.0;
  inner.minsamp = 5;
  inner.mincsamp = 10;

  QuadraticGame qg;
  // compliant region [0.5, 10.5]; the argmax 13.3 lies outside it
  const auto spec = qg.spec(0.5, 10.5);
  Rng rng(6006);
  int near = 0, compliant_ok = 0;
  const int runs = 100, compliant_runs = 20;
  auto solve = [&](EmpiricalGame& g, Scheduler& s) {
    return merge_solutions(run_inner_loop(g, s, inner).confirmed(), {}).at(0);
  };
  for (int i = 0; i < runs; ++i) {
    auto g = qg.make(uniform_int(rng, 0, 10));
    auto oracle = qg.oracle();
    Scheduler s(g, oracle, {1, rng()});
    auto sol = solve(g, s);
    const auto res = explore(g, sol, 0, ComplianceMode::non_compliant, outer, spec, s, 1);
    if (res.outcome == ExploreOutcome::added && std::abs(g.strategy(0, res.strategy).params[0] - qg.peak) <= qg.step)
      ++near;
  }
  for (int i = 0; i < compliant_runs; ++i) {
    auto g = qg.make(uniform_int(rng, 1, 8));
    auto oracle = qg.oracle();
    Scheduler s(g, oracle, {1, rng()});
    auto sol = solve(g, s);
    const auto res = explore(g, sol, 0, ComplianceMode::compliant, outer, spec, s, 1);
    if (res.outcome == ExploreOutcome::added) {
      const auto& st = g.strategy(0, res.strategy);
      if (is_compliant(st, spec) && st.params[0] == 10.0) ++compliant_ok;
    }
  }
  return {near >= 95 && compliant_ok == compliant_runs,
          fmt("%.0f/100 within one step of 13.3; compliant mode best point 10 in %.0f/%.0f", near, compliant_ok,
              compliant_runs)};
}

// 7 ------------------------------------------------------------------------
std::vector<ibr::PolicyParams> random_policies(Rng& rng, int n) {
  const auto doms = ibr::policy_domains();
  const int style = uniform_int(rng, 0, 2);
  std::vector<ibr::PolicyParams> out;
  for (int i = 0; i < n; ++i) {
    if (style == 0) {
      out.push_back(ibr::default_compliant());
    } else if (style == 1) {
      out.push_back(uniform_int(rng, 0, 1) ? ibr::default_compliant() : ibr::oblivious());
    } else {
      std::vector<double> v;
      for (const auto& d : doms) v.push_back(d.at(uniform_int(rng, 0, static_cast<int>(d.steps()))));
      out.push_back(ibr::PolicyParams::from_vector(v));
    }
  }
  return out;
}

Verdict simulator_invariants() {
  const auto cfg = scaled_down(4, 1);
  Rng rng(7007);
  int bad = 0;
  std::string first;
  std::uint64_t endpoints = 0, attacks = 0;
  for (int run = 0; run < 50; ++run) {
    const auto pol = random_policies(rng, cfg.n_honest());
    const auto seed = rng();
    ibr::SimOptions o;
    o.verify_invariants = true;
    const auto a = ibr::run_simulation(cfg, pol, seed, o);
    const auto b = ibr::run_simulation(cfg, pol, seed, o);
    std::vector<std::string> why;
    if (a.trace_hash != b.trace_hash || a.payoff != b.payoff || a.chain_lengths != b.chain_lengths)
      why.push_back("replay differs");
    if (a.agg.attacks_attempted != a.agg.attacks_detected + a.agg.attacks_undetected ||
        a.agg.attacks_succeeded > a.agg.attacks_undetected)
      why.push_back("attack counts not conserved");
    if (!a.violations.empty()) why.push_back(a.violations.front());
    if (a.chain_lengths[0] != 0) why.push_back("zero-length chain");
    endpoints += a.chain_lengths[1] + a.chain_lengths[2] + a.chain_lengths[3] + a.chain_lengths[4];
    attacks += a.agg.attacks_attempted;
    if (!why.empty()) {
      ++bad;
      if (first.empty()) first = " (run " + std::to_string(run) + ": " + why.front() + ")";
    }
  }
  return {bad == 0 && endpoints > 0,
          fmt("%.0f/50 runs violated; %.0f endpoint connections, %.0f attacks", bad, static_cast<double>(endpoints),
              static_cast<double>(attacks)) +
              first};
}

// 8 ------------------------------------------------------------------------
Verdict security_direction() {
  const auto cfg = scaled_down(4, 0);
  const std::vector<ibr::PolicyParams> comp(static_cast<std::size_t>(cfg.n_honest()), ibr::default_compliant());
  const std::vector<ibr::PolicyParams> obl(static_cast<std::size_t>(cfg.n_honest()), ibr::oblivious());
  int wins = 0, losses = 0;
  std::uint64_t tc = 0, to = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto a = ibr::run_simulation(cfg, comp, seed).agg.attacks_succeeded;
    const auto b = ibr::run_simulation(cfg, obl, seed).agg.attacks_succeeded;
    tc += a;
    to += b;
    wins += a < b;
    losses += a > b;
  }
  const int n = wins + losses;
  const double p = n > 0 ? sign_test_p(wins, n) : 1.0;
  return {p < 0.05, fmt("compliant fewer in %.0f, more in %.0f of 30 pairs; sign test p=%.2e; totals ", wins, losses, p) +
                        std::to_string(tc) + " vs " + std::to_string(to)};
}

// 9 ------------------------------------------------------------------------
Verdict calibration(const Paths& paths) {
  cli::Options o;
  o.config = paths.configs / "env1.json";
  o.out = paths.work / "env1_simulate";
  std::ostringstream sink;
  o.msg = &sink;
  if (cli::guarded(o, cli::cmd_simulate) != cli::kOk) return {false, "simulate failed: " + sink.str()};
  const auto res = io::load_json(*o.out / "sim_result.json");
  const auto man = io::load_json(*o.out / "manifest.json");
  const double mpc = res.at("messages_per_client").get<double>();
  const bool recorded = man.contains("calibration") && man["calibration"].value("messages_per_client", 0.0) == 330.0 &&
                        man["calibration"]["band"] == json::array({250.0, 450.0});
  return {mpc >= 250 && mpc <= 450 && recorded,
          fmt("%.1f messages per client (band [250, 450]); calibration in manifest=%.0f", mpc, recorded)};
}

// 10 -----------------------------------------------------------------------
Verdict desk_search(const Paths& paths) {
  cli::Options o;
  o.config = paths.configs / "desk_search.json";
  o.out = paths.work / "desk_search";
  fs::remove_all(*o.out);
  std::ostringstream sink;
  o.msg = &sink;
  cli::SearchOutcome out;
  try {
    out = cli::run_search(o);
  } catch (const std::exception& e) {
    return {false, std::string("search threw: ") + e.what()};
  }
  const auto& rep = out.report;
  const double tau = rep.at("tau").get<double>();

  // everything below works from the archive only
  auto gs = io::game_from_json(io::load_json(*o.out / "game.json"));
  io::load_log(gs.game, *o.out / "payoffs.jsonl");
  const auto& g = gs.game;
  std::set<std::pair<std::size_t, int>> generated;
  for (std::size_t r = 0; r < g.role_count(); ++r)
    for (std::size_t i = 0; i < g.catalog_size(r); ++i)
      if (g.strategy(r, static_cast<int>(i)).auto_generated) generated.insert({r, static_cast<int>(i)});
  bool logged_generated = false;
  for (const auto& p : g.db().profiles())
    for (std::size_t r = 0; r < p.roles.size() && !logged_generated; ++r)
      for (int s : p.roles[r]) logged_generated = logged_generated || generated.count({r, s});

  std::size_t verified = 0;
  double worst = 0;
  for (const auto& sol : rep.at("solutions")) {
    const auto q = io::mixture_from_json(g, sol.at("mixture"));
    const auto rr = regret(g, q, g.candidate_sets());
    const auto brute = brute_regret(g, q);
    worst = std::max(worst, rr.regret);
    if (rr.fully_evaluated && rr.regret <= tau + 1e-9 && std::abs(rr.regret - brute.regret) <= 1e-9) ++verified;
  }
  const std::size_t n = rep.at("solutions").size();
  return {n >= 1 && verified == n && logged_generated,
          fmt("%.0f solutions, %.0f re-verified (max eps %.3g, tau %.3g)", static_cast<double>(n),
              static_cast<double>(verified), worst, tau) +
              "; " + std::to_string(generated.size()) + " auto-generated strategies, logged=" +
              (logged_generated ? "yes" : "no") + "; " + std::to_string(rep.value("sims_run", 0)) + " simulations"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  Paths paths;
  std::vector<int> only;
  app.add_option("--configs", paths.configs, "configs directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--work", paths.work, "scratch directory")->required();
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(paths.work);

  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Verdict()> run;
  };
  const double none = 0;
  const std::vector<Criterion> all{
      {1, "regret oracle equivalence", 60, regret_oracle},
      {2, "maximal subgame oracle equivalence", 60, subgame_oracle},
      {3, "footnote game", none, footnote},
      {4, "replicator dynamics sanity", none, replicator},
      {5, "compliance arithmetic", none, compliance_arithmetic},
      {6, "outer-loop hill climbing", 120, hill_climbing},
      {7, "simulator determinism and conservation", 300, simulator_invariants},
      {8, "directional security property", none, security_direction},
      {9, "message-volume calibration", none, [&] { return calibration(paths); }},
      {10, "end-to-end desk-scale search", 7200, [&] { return desk_search(paths); }},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      v.pass = false;
      v.detail += fmt("; over the %.0f s limit", c.limit_seconds);
    }
    failed += !v.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
