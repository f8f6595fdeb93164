#include <CLI11.hpp>

#include "cegta/commands.hpp"

int main(int argc, char** argv) {
  using namespace cegta::cli;
  CLI::App app{"Compliance search over empirical games of introduction-based routing"};
  app.require_subcommand(1);

  Options opt;
  std::string config, out, profile, log;
  std::uint64_t seed = 0;
  double tau = 0, wall = 0;
  std::size_t iters = 0, workers = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--workers", workers, "simulation threads");
  };
  auto* simulate = app.add_subcommand("simulate", "run one profile through the simulator");
  common(simulate);
  simulate->add_option("--profile", profile, "profile as JSON: {\"role\": [\"id\", ...]}");

  auto* analyze = app.add_subcommand("analyze", "game analysis over the payoff database");
  common(analyze);
  analyze->add_option("--tau", tau, "regret threshold");
  analyze->add_option("--log", log, "payoff log (JSONL)");

  auto* search = app.add_subcommand("search", "compliance search");
  common(search);
  search->add_option("--tau", tau, "regret threshold");
  search->add_option("--budget-iters", iters, "outer iterations");
  search->add_option("--budget-wall", wall, "wall-clock seconds");

  auto* status = app.add_subcommand("status", "payoff database coverage");
  common(status);
  status->add_option("--log", log, "payoff log (JSONL)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  const auto* sub = app.get_subcommands().front();
  opt.config = config;
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--out")) opt.out = out;
  if (sub->count("--workers")) opt.workers = workers;
  if (sub->get_option_no_throw("--tau") && sub->count("--tau")) opt.tau = tau;
  if (sub->get_option_no_throw("--profile") && sub->count("--profile")) opt.profile = profile;
  if (sub->get_option_no_throw("--log") && sub->count("--log")) opt.log = log;
  if (sub->get_option_no_throw("--budget-iters") && sub->count("--budget-iters")) opt.budget_iters = iters;
  if (sub->get_option_no_throw("--budget-wall") && sub->count("--budget-wall")) opt.budget_wall = wall;

  if (sub == simulate) return guarded(opt, cmd_simulate);
  if (sub == analyze) return guarded(opt, cmd_analyze);
  if (sub == search) return guarded(opt, cmd_search);
  return guarded(opt, cmd_status);
}
