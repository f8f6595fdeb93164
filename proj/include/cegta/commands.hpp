#pragma once

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "cegta/cegta.hpp"
#include "cegta/io.hpp"

namespace cegta::cli {

namespace fs = std::filesystem;
using io::json;

struct Options {
  fs::path config;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;
  std::optional<double> tau;
  std::optional<std::size_t> budget_iters;
  std::optional<double> budget_wall;
  std::optional<std::string> profile;
  std::optional<fs::path> log;
  std::optional<std::size_t> workers;
  std::ostream* msg = &std::cout;
  std::ostream* err = &std::cerr;
};

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2 };

struct Workspace {
  io::RunConfig rc;
  fs::path out;
  fs::path game_file() const { return out / "game.json"; }
  fs::path log_file() const { return out / "payoffs.jsonl"; }
};

inline Workspace open_workspace(const Options& o) {
  Workspace w{io::load_run_config(o.config), {}};
  auto& raw = w.rc.raw;
  // flags are folded into the raw config so the manifest hash covers them
  if (o.seed) raw["seed"] = w.rc.seed = *o.seed;
  if (o.tau) {
    raw["inner"]["tau"] = w.rc.search.inner.tau = *o.tau;
    if (raw["inner"].contains("tau_relative")) raw["inner"].erase("tau_relative");
    w.rc.tau_relative.reset();
  }
  if (o.budget_iters) raw["budget"]["outer_iterations"] = w.rc.search.max_outer_iterations = *o.budget_iters;
  if (o.budget_wall) {
    w.rc.search.wall_budget_seconds = *o.budget_wall;
    raw["budget"]["wall_seconds"] = *o.budget_wall;
  }
  if (o.workers) w.rc.workers = *o.workers;
  w.out = o.out ? *o.out : (w.rc.out_dir.is_absolute() ? w.rc.out_dir : w.rc.base / w.rc.out_dir);
  return w;
}

/// Game plus data: the archived catalog and log in the output directory
/// when present, otherwise the configured game (and configured log).
inline io::GameSpec load_state(const Workspace& w, const Options& o) {
  io::GameSpec gs = w.rc.game;
  if (fs::exists(w.game_file())) gs = io::game_from_json(io::load_json(w.game_file()));
  std::optional<fs::path> log = o.log;
  if (!log && fs::exists(w.log_file())) log = w.log_file();
  if (!log && w.rc.payoff_log) log = w.rc.payoff_log;
  if (log) io::load_log(gs.game, *log);
  return gs;
}

inline SchedulerOptions scheduler_options(const io::RunConfig& rc) {
  SchedulerOptions so;
  so.master_seed = rc.seed;
  if (rc.workers > 0) so.workers = rc.workers;
  return so;
}

inline void write_manifest(const Workspace& w, const std::string& command) {
  io::write_json(w.out / "manifest.json", io::manifest(w.rc, command));
}

inline PureProfile all_first_profile(const EmpiricalGame& g) {
  PureProfile p;
  p.roles.resize(g.role_count());
  for (std::size_t r = 0; r < g.role_count(); ++r)
    p.roles[r].assign(static_cast<std::size_t>(g.role(r).player_count), g.candidates(r).at(0));
  return p;
}

/// Mean absolute player payoff of the all-first-strategy profile, from data
/// already in the database.
inline std::optional<double> typical_payoff(const EmpiricalGame& g) {
  const auto st = g.db().stats(all_first_profile(g));
  if (!st) return std::nullopt;
  double sum = 0.0;
  for (double v : st->mean) sum += std::abs(v);
  return sum / static_cast<double>(st->mean.size());
}

/// Same, sampling the profile up to n first.
inline double typical_payoff(EmpiricalGame& g, Scheduler& sched, std::size_t n) {
  sched.schedule_profiles({all_first_profile(g)}, n);
  return *typical_payoff(g);
}

inline int cmd_simulate(const Options& o) {
  auto w = open_workspace(o);
  auto& g = w.rc.game.game;
  PureProfile p;
  if (o.profile) {
    try {
      p = io::profile_from_json(g, io::parse_json(*o.profile, "--profile"));
    } catch (const DataError& e) {
      throw ConfigError(std::string("--profile: ") + e.what());
    }
  } else {
    p = all_first_profile(g);
  }
  const auto& sc = w.rc.scenario;
  const auto policies = ibr::expand_profile(g, p, sc.network);
  ibr::SimOptions so;
  so.weights = sc.weights;
  const auto res = ibr::run_simulation(sc.network, policies, w.rc.seed, so);
  json j = io::sim_result_to_json(res);
  j["profile"] = io::profile_to_json(g, p);
  j["seed"] = w.rc.seed;
  ibr::IbrOracle oracle(sc.network, sc.weights);
  j["player_payoffs"] = oracle.simulate(g, p, w.rc.seed);
  io::write_json(w.out / "sim_result.json", j);
  write_manifest(w, "simulate");
  *o.msg << "simulated " << res.payoff.size() << " nodes, " << res.agg.messages_generated << " messages, "
         << res.agg.attacks_succeeded << " successful attacks; wrote " << (w.out / "sim_result.json").string() << "\n";
  return kOk;
}

inline int cmd_analyze(const Options& o) {
  auto w = open_workspace(o);
  const auto gs = load_state(w, o);
  double tau = o.tau ? *o.tau : w.rc.search.inner.tau;
  if (!o.tau && w.rc.tau_relative) {
    const auto typical = typical_payoff(gs.game);
    if (!typical && gs.game.db().size() > 0) throw ConfigError("tau_relative needs the all-first-strategy profile in the database; pass --tau");
    if (typical) tau = *w.rc.tau_relative * *typical;
  }
  const auto X = game_analysis(gs.game, tau);
  json j = io::candidate_set_to_json(gs.game, X, &gs.compliance);
  j["tau"] = tau;
  j["profiles_evaluated"] = gs.game.db().profile_count();
  io::write_json(w.out / "analysis.json", j);
  write_manifest(w, "analyze");
  if (X.subgames.empty()) {
    *o.msg << "no complete subgames\n";
    return kOk;
  }
  *o.msg << X.subgames.size() << " maximal complete subgames; " << X.confirmed.size() << " confirmed, "
         << X.unconfirmed.size() << " unconfirmed, " << X.refuted.size() << " refuted\n";
  for (const auto* list : {&X.confirmed, &X.unconfirmed, &X.refuted})
    for (const auto& c : *list)
      *o.msg << "  " << to_string(c.status) << "  eps=" << c.regret << "  " << gs.game.mixture_id(c.mixture) << "\n";
  return kOk;
}

inline int cmd_status(const Options& o) {
  auto w = open_workspace(o);
  const auto gs = load_state(w, o);
  const auto& g = gs.game;
  const double space = g.profile_space_size();
  const auto covered = g.evaluated_in_candidates();
  json j{{"profiles", g.db().profile_count()},
         {"samples", g.db().size()},
         {"profiles_in_candidate_space", covered},
         {"profile_space", space},
         {"coverage_percent", space > 0 ? 100.0 * static_cast<double>(covered) / space : 0.0}};
  json per_role = json::array();
  for (std::size_t r = 0; r < g.role_count(); ++r)
    per_role.push_back({{"role", g.role(r).name},
                        {"candidates", g.candidates(r).size()},
                        {"catalog", g.catalog_size(r)}});
  j["roles"] = per_role;
  *o.msg << j.dump(2) << "\n";
  return kOk;
}

struct SearchOutcome {
  int exit_code = kOk;
  json report;
  fs::path out;
};

inline SearchOutcome run_search(const Options& o) {
  auto w = open_workspace(o);
  fs::create_directories(w.out);
  auto gs = load_state(w, o);
  auto& g = gs.game;
  write_manifest(w, "search");

  std::size_t saved_sizes = 0;
  auto save_game = [&] {
    io::write_json(w.game_file(), io::game_to_json(gs));
    saved_sizes = 0;
    for (std::size_t r = 0; r < g.role_count(); ++r) saved_sizes += g.catalog_size(r);
  };
  save_game();
  io::LogWriter log(g, w.log_file());
  std::ofstream progress(w.out / "progress.jsonl", std::ios::app);

  ibr::IbrOracle oracle(w.rc.scenario.network, w.rc.scenario.weights);
  Scheduler sched(g, oracle, scheduler_options(w.rc));
  sched.set_observer([&](const Observation& obs) {
    std::size_t sizes = 0;
    for (std::size_t r = 0; r < g.role_count(); ++r) sizes += g.catalog_size(r);
    if (sizes != saved_sizes) save_game();
    log(obs);
  });

  auto cfg = w.rc.search;
  if (w.rc.tau_relative) {
    cfg.inner.tau = *w.rc.tau_relative * typical_payoff(g, sched, cfg.inner.minsamp);
    progress << json{{"event", "tau"}, {"tau", cfg.inner.tau}}.dump() << "\n";
  }
  SearchObserver obs;
  obs.inner_progress = [&](const ProgressRecord& p) {
    progress << io::progress_to_json(p).dump() << "\n";
    progress.flush();
  };
  obs.explored = [&](const ExploreEvent& e) {
    json ev{{"event", "explore"},
            {"iteration", e.iteration},
            {"role", g.role(e.role).name},
            {"mode", to_string(e.mode)},
            {"target", e.target},
            {"outcome", to_string(e.result.outcome)},
            {"gain", e.result.gain},
            {"generated", e.result.generated.size()},
            {"sims_run", sched.runs_executed()}};
    if (e.result.strategy >= 0) ev["strategy"] = g.strategy(e.role, e.result.strategy).id;
    progress << ev.dump() << "\n";
    progress.flush();
    save_game();
  };

  SearchOutcome out;
  out.out = w.out;
  SearchResult res;
  try {
    res = compliance_search(g, sched, cfg, obs);
  } catch (const InnerLoopBudgetError& e) {
    res.solutions = merge_solutions(e.partial().confirmed, {});
    res.status = "open solutions remain";
    progress << json{{"event", "budget"}, {"what", e.what()}}.dump() << "\n";
  }
  save_game();
  out.report = io::search_report(g, res, gs.compliance);
  out.report["tau"] = cfg.inner.tau;
  out.report["sims_run"] = sched.runs_executed();
  io::write_json(w.out / "report.json", out.report);
  *o.msg << "search " << res.status << ": " << res.solutions.size() << " solutions, " << res.outer_iterations
         << " outer iterations, " << sched.runs_executed() << " simulations; report in "
         << (w.out / "report.json").string() << "\n";
  return out;
}

inline int cmd_search(const Options& o) { return run_search(o).exit_code; }

/// Maps failures to exit codes: 1 for usage/configuration, 2 for runtime.
template <class F>
int guarded(const Options& o, F&& f) {
  try {
    return f(o);
  } catch (const ConfigError& e) {
    *o.err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    *o.err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace cegta::cli
