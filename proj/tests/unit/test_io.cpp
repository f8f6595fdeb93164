#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "cegta/io.hpp"
#include "support/oracles.hpp"

using namespace cegta;
using namespace cegta::testing;
namespace fs = std::filesystem;
using io::json;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cegta_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json toy_game_json() {
  return json::parse(R"({
    "roles": [{"name": "a", "players": 2, "nodes": 4}, {"name": "b", "players": 1}],
    "parameters": [{"name": "v", "lo": 0, "hi": 1, "step": 0.1}],
    "strategies": [
      {"id": "A0", "role": "a", "params": [0.2], "label": "low"},
      {"id": "A1", "role": "a", "params": {"v": 0.8}},
      {"id": "B0", "role": "b", "params": [0.5]}
    ],
    "compliance": {"aggregation": "min_margin", "parameters": {"v": [0.5, null]}}
  })");
}

}  // namespace

TEST(Io, ParseErrorsCarryLineAndColumn) {
  try {
    io::parse_json("{\n  \"a\": 1,\n  oops\n}", "cfg.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Io, GameRoundTrip) {
  auto gs = io::game_from_json(toy_game_json());
  auto& g = gs.game;
  EXPECT_EQ(g.role(0).node_count, 4);
  EXPECT_EQ(g.role(1).node_count, 1);
  EXPECT_EQ(g.strategy(0, 0).label, "low");
  EXPECT_DOUBLE_EQ(g.strategy(0, 1).params[0], 0.8);
  EXPECT_FALSE(is_compliant(g.strategy(0, 0), gs.compliance));
  EXPECT_TRUE(is_compliant(g.strategy(0, 1), gs.compliance));
  Strategy extra = g.strategy(0, 0);
  extra.params = {0.4};
  extra.id = "x2";
  extra.auto_generated = true;
  g.add_strategy(extra, false);

  const auto back = io::game_from_json(io::game_to_json(gs));
  EXPECT_EQ(back.game.catalog_size(0), 3u);
  EXPECT_EQ(back.game.candidates(0), (std::vector<int>{0, 1}));
  EXPECT_TRUE(back.game.strategy(0, 2).auto_generated);
  EXPECT_EQ(io::game_to_json(back), io::game_to_json(gs));
}

TEST(Io, GameErrors) {
  auto j = toy_game_json();
  j["strategies"][0]["params"] = {{"w", 0.1}};
  EXPECT_THROW(io::game_from_json(j), ConfigError);
  j = toy_game_json();
  j["strategies"][0]["params"] = {3.0};
  EXPECT_THROW(io::game_from_json(j), ConfigError);
  j = toy_game_json();
  j.erase("roles");
  EXPECT_THROW(io::game_from_json(j), ConfigError);
}

TEST(Io, LogRoundTripReproducesDatabase) {
  const auto dir = scratch("log");
  auto gs = io::game_from_json(toy_game_json());
  Rng rng(2);
  {
    io::LogWriter w(gs.game, dir / "payoffs.jsonl");
    for (int i = 0; i < 30; ++i) {
      PureProfile p{{{uniform_int(rng, 0, 1), uniform_int(rng, 0, 1)}, {0}}};
      p.canonicalize();
      gs.game.record_observation(p, {uniform(rng, -9, 9), uniform(rng, -9, 9), 0.125 * i}, rng(), i);
      w(gs.game.db().log().back());
    }
  }
  auto fresh = io::game_from_json(toy_game_json());
  EXPECT_EQ(io::load_log(fresh.game, dir / "payoffs.jsonl"), 30u);
  for (const auto& p : gs.game.db().profiles()) {
    EXPECT_EQ(fresh.game.samples(p), gs.game.samples(p));
    EXPECT_EQ(fresh.game.db().stats(p)->mean, gs.game.db().stats(p)->mean);
  }
  io::write_text(dir / "bad.jsonl", "{\"profile\": {\"a\": [\"A0\", \"ZZ\"], \"b\": [\"B0\"]}, \"payoffs\": [1,2,3], \"seed\": 1}\n");
  EXPECT_THROW(io::load_log(fresh.game, dir / "bad.jsonl"), DataError);
  fs::remove_all(dir);
}

TEST(Io, ProfileFromJsonNamesUnassignedRole) {
  auto gs = io::game_from_json(toy_game_json());
  try {
    io::profile_from_json(gs.game, json::parse(R"({"a": ["A0"], "b": ["B0"]})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("role a"), std::string::npos);
  }
}

TEST(Io, IncludesAndEnvOverrides) {
  const auto dir = scratch("cfg");
  io::write_json(dir / "game.json", toy_game_json());
  io::write_json(dir / "scenario.json", json{{"N_R", 2}, {"N_I", 1}, {"c_per_isp", 2}});
  io::write_json(dir / "run.json", json::parse(R"({
    "game": {"$include": "game.json"},
    "scenario": {"$include": "scenario.json"},
    "seed": 9,
    "inner": {"tau": 0.5, "minsamp": 2, "mincsamp": 4},
    "budget": {"outer_iterations": 3}
  })"));
  std::string e1 = "CEGTA_SEED=11", e2 = "CEGTA_INNER__TAU=0.25", e3 = "CEGTA_OUT=somewhere", e4 = "PATH=/bin";
  char* env[] = {e1.data(), e2.data(), e3.data(), e4.data(), nullptr};
  const auto rc = io::load_run_config(dir / "run.json", env);
  EXPECT_EQ(rc.seed, 11u);
  EXPECT_DOUBLE_EQ(rc.search.inner.tau, 0.25);
  EXPECT_EQ(rc.search.inner.minsamp, 2u);
  EXPECT_EQ(rc.search.outer.mincsamp, 4u);
  EXPECT_EQ(rc.search.max_outer_iterations, 3u);
  EXPECT_EQ(rc.out_dir, fs::path("somewhere"));
  EXPECT_EQ(rc.scenario.network.n_honest(), 2 + 1 + 2 + 1);

  char* none[] = {nullptr};
  const auto plain_rc = io::load_run_config(dir / "run.json", none);
  EXPECT_EQ(plain_rc.seed, 9u);
  EXPECT_NE(io::config_hash(plain_rc.raw), io::config_hash(rc.raw));
  EXPECT_EQ(io::config_hash(plain_rc.raw), io::config_hash(io::load_run_config(dir / "run.json", none).raw));

  const auto m = io::manifest(rc, "search");
  EXPECT_EQ(m["seed"], 11u);
  EXPECT_EQ(m["calibration"]["messages_per_client"], 330.0);
  fs::remove_all(dir);
}

TEST(Io, BadConfigValues) {
  const auto dir = scratch("bad");
  io::write_json(dir / "run.json", json{{"game", toy_game_json()}, {"inner", {{"minsamp", 3}, {"mincsamp", 3}}}});
  char* none[] = {nullptr};
  EXPECT_THROW(io::load_run_config(dir / "run.json", none), ConfigError);
  io::write_json(dir / "run2.json", json{{"game", toy_game_json()}, {"scenario", {{"N_R", 1}}}});
  EXPECT_THROW(io::load_run_config(dir / "run2.json", none), ConfigError);
  EXPECT_THROW(io::load_run_config(dir / "missing.json", none), ConfigError);
  fs::remove_all(dir);
}

TEST(Io, ScenarioRoundTrip) {
  io::Scenario s;
  s.network.n_roots = 5;
  s.network.attack_targets = ibr::TargetSet::servers_only;
  s.weights.v_fee = 3;
  const auto back = io::scenario_from_json(io::scenario_to_json(s));
  EXPECT_EQ(io::scenario_to_json(back), io::scenario_to_json(s));
}

TEST(Io, CandidateReportNotesEmptyDatabase) {
  auto gs = io::game_from_json(toy_game_json());
  const auto X = game_analysis(gs.game, 0.0);
  const auto j = io::candidate_set_to_json(gs.game, X, &gs.compliance);
  EXPECT_EQ(j["note"], "no complete subgames");
  EXPECT_TRUE(j["candidates"].empty());
}
