#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cegta/analysis.hpp"
#include "cegta/explore.hpp"
#include "cegta/ibr/config.hpp"
#include "cegta/ibr/simulator.hpp"
#include "cegta/rng.hpp"

extern char** environ;

namespace cegta::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kEnvPrefix = "CEGTA_";

// files ------------------------------------------------------------------

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parse JSON text; errors carry line and column.
inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline json load_json(const fs::path& path) { return parse_json(read_text(path), path.string()); }

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Replace {"$include": "file"} objects (paths relative to `base`) with the
/// file contents, recursively.
inline void resolve_includes(json& j, const fs::path& base, int depth = 0) {
  if (depth > 16) throw ConfigError("include nesting too deep");
  if (j.is_object()) {
    if (j.size() == 1 && j.contains("$include")) {
      const fs::path p = base / j["$include"].get<std::string>();
      json inc = load_json(p);
      resolve_includes(inc, p.parent_path(), depth + 1);
      j = std::move(inc);
      return;
    }
    for (auto& [k, v] : j.items()) resolve_includes(v, base, depth);
  } else if (j.is_array()) {
    for (auto& v : j) resolve_includes(v, base, depth);
  }
}

/// CEGTA_A__B=value sets j["a"]["b"]; the value is parsed as JSON when it
/// parses, kept as a string otherwise.
inline void apply_env_overrides(json& j, char** env = environ, const std::string& prefix = kEnvPrefix) {
  if (!env) return;
  for (char** e = env; *e; ++e) {
    const std::string kv = *e;
    if (kv.rfind(prefix, 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    std::string key = kv.substr(prefix.size(), eq - prefix.size());
    const std::string raw = kv.substr(eq + 1);
    for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    json* node = &j;
    std::size_t pos = 0;
    while (true) {
      const auto sep = key.find("__", pos);
      const std::string part = key.substr(pos, sep == std::string::npos ? std::string::npos : sep - pos);
      if (part.empty()) break;
      if (!node->is_object()) *node = json::object();
      if (sep == std::string::npos) {
        json v = json::parse(raw, nullptr, false);
        (*node)[part] = v.is_discarded() ? json(raw) : v;
        break;
      }
      node = &(*node)[part];
      pos = sep + 2;
    }
  }
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// FNV-1a of the compact dump (object keys are sorted by nlohmann::json).
inline std::string config_hash(const json& j) {
  const auto s = j.dump();
  return hex64(fnv1a(s.data(), s.size()));
}

// numbers ----------------------------------------------------------------

inline json bound_to_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

inline double bound_from_json(const json& j, double missing) {
  if (j.is_null()) return missing;
  return j.get<double>();
}

// game -------------------------------------------------------------------

inline ParamDomain domain_from_json(const json& j) {
  ParamDomain d;
  d.name = j.at("name").get<std::string>();
  d.lo = j.at("lo").get<double>();
  d.hi = j.at("hi").get<double>();
  d.step = j.at("step").get<double>();
  d.validate();
  return d;
}

inline json domain_to_json(const ParamDomain& d) {
  return {{"name", d.name}, {"lo", d.lo}, {"hi", d.hi}, {"step", d.step}};
}

inline ParamSpace parameters_from_json(const json& j) {
  ParamSpace out;
  if (j.is_null()) return out;
  for (const auto& d : j) out.push_back(domain_from_json(d));
  return out;
}

inline ComplianceSpec compliance_from_json(const json& j, const ParamSpace& domains) {
  ComplianceSpec s;
  s.intervals.assign(domains.size(), std::nullopt);
  if (j.is_null()) return s;
  const std::string agg = j.value("aggregation", "min_margin");
  if (agg == "binary") s.aggregation = Aggregation::binary;
  else if (agg != "min_margin") throw ConfigError("unknown compliance aggregation '" + agg + "'");
  for (const auto& [name, iv] : j.at("parameters").items()) {
    std::size_t i = 0;
    while (i < domains.size() && domains[i].name != name) ++i;
    if (i == domains.size()) throw ConfigError("compliance names unknown parameter '" + name + "'");
    if (!iv.is_array() || iv.size() != 2) throw ConfigError("compliance interval for '" + name + "' must be [lo, hi]");
    const double inf = std::numeric_limits<double>::infinity();
    s.intervals[i] = ComplianceInterval{bound_from_json(iv[0], -inf), bound_from_json(iv[1], inf)};
  }
  return s;
}

inline json compliance_to_json(const ComplianceSpec& s, const ParamSpace& domains) {
  json params = json::object();
  for (std::size_t i = 0; i < s.intervals.size() && i < domains.size(); ++i)
    if (s.intervals[i]) params[domains[i].name] = {bound_to_json(s.intervals[i]->lo), bound_to_json(s.intervals[i]->hi)};
  return {{"aggregation", s.aggregation == Aggregation::binary ? "binary" : "min_margin"}, {"parameters", params}};
}

/// Everything a game file describes.
struct GameSpec {
  EmpiricalGame game;
  ParamSpace parameters;
  ComplianceSpec compliance;
};

inline std::vector<double> params_from_json(const json& j, const ParamSpace& domains, const std::string& id) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else if (j.is_object()) {
    out.assign(domains.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& [name, v] : j.items()) {
      std::size_t i = 0;
      while (i < domains.size() && domains[i].name != name) ++i;
      if (i == domains.size()) throw ConfigError("strategy " + id + ": unknown parameter '" + name + "'");
      out[i] = v.get<double>();
    }
    for (std::size_t i = 0; i < out.size(); ++i)
      if (std::isnan(out[i])) throw ConfigError("strategy " + id + ": parameter '" + domains[i].name + "' missing");
  } else if (!j.is_null()) {
    throw ConfigError("strategy " + id + ": params must be an array or object");
  }
  return out;
}

inline GameSpec game_from_json(const json& j) {
  try {
    std::vector<RoleSpec> roles;
    for (const auto& r : j.at("roles")) {
      RoleSpec rs;
      rs.name = r.at("name").get<std::string>();
      rs.player_count = r.at("players").get<int>();
      rs.node_count = r.value("nodes", rs.player_count);
      if (r.contains("weights"))
        for (const auto& [k, v] : r["weights"].items()) rs.weight_overrides[k] = v.get<double>();
      roles.push_back(rs);
    }
    GameSpec gs{EmpiricalGame(std::move(roles)), parameters_from_json(j.value("parameters", json())), {}};
    for (const auto& s : j.at("strategies")) {
      Strategy st;
      st.id = s.at("id").get<std::string>();
      st.role = s.at("role").get<std::string>();
      st.domains = gs.parameters;
      st.params = params_from_json(s.value("params", json()), gs.parameters, st.id);
      if (st.params.empty()) st.domains.clear();
      st.label = s.value("label", st.id);
      st.auto_generated = s.value("auto_generated", false);
      gs.game.add_strategy(std::move(st), s.value("candidate", true));
    }
    gs.compliance = compliance_from_json(j.value("compliance", json()), gs.parameters);
    return gs;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("game definition: ") + e.what());
  }
}

inline json strategy_to_json(const Strategy& s, const ComplianceSpec* spec = nullptr) {
  json j{{"id", s.id}, {"role", s.role}, {"params", s.params}, {"label", s.label},
         {"auto_generated", s.auto_generated}};
  if (spec) j["c"] = strategy_compliance(s, *spec);
  return j;
}

/// Game file including the catalog; strategies outside C carry
/// "candidate": false.
inline json game_to_json(const GameSpec& gs) {
  const auto& g = gs.game;
  json roles = json::array();
  for (const auto& r : g.roles()) {
    json rj{{"name", r.name}, {"players", r.player_count}, {"nodes", r.node_count}};
    if (!r.weight_overrides.empty()) rj["weights"] = r.weight_overrides;
    roles.push_back(rj);
  }
  json params = json::array();
  for (const auto& d : gs.parameters) params.push_back(domain_to_json(d));
  json strategies = json::array();
  for (std::size_t r = 0; r < g.role_count(); ++r)
    for (std::size_t i = 0; i < g.catalog_size(r); ++i) {
      auto sj = strategy_to_json(g.strategy(r, static_cast<int>(i)));
      sj["candidate"] = g.is_candidate(r, static_cast<int>(i));
      strategies.push_back(sj);
    }
  return {{"roles", roles},
          {"parameters", params},
          {"strategies", strategies},
          {"compliance", compliance_to_json(gs.compliance, gs.parameters)}};
}

// profiles and the payoff log ---------------------------------------------

inline json profile_to_json(const EmpiricalGame& g, const PureProfile& p) {
  json j = json::object();
  for (std::size_t r = 0; r < p.roles.size(); ++r) {
    json ids = json::array();
    for (int s : p.roles[r]) ids.push_back(g.strategy(r, s).id);
    j[g.role(r).name] = ids;
  }
  return j;
}

inline PureProfile profile_from_json(const EmpiricalGame& g, const json& j) {
  if (!j.is_object()) throw DataError("profile must be an object of role -> strategy ids");
  PureProfile p;
  p.roles.resize(g.role_count());
  for (const auto& [role, ids] : j.items()) {
    const auto r = g.role_index(role);
    for (const auto& id : ids) {
      const auto idx = g.find_strategy(r, id.get<std::string>());
      if (!idx) throw DataError("unknown strategy '" + id.get<std::string>() + "' in role " + role);
      p.roles[r].push_back(*idx);
    }
  }
  for (std::size_t r = 0; r < g.role_count(); ++r)
    if (p.roles[r].size() != static_cast<std::size_t>(g.role(r).player_count))
      throw ConfigError("profile assigns " + std::to_string(p.roles[r].size()) + " of " +
                        std::to_string(g.role(r).player_count) + " players in role " + g.role(r).name);
  p.canonicalize();
  return p;
}

inline json observation_to_json(const EmpiricalGame& g, const Observation& o) {
  return {{"profile", profile_to_json(g, o.profile)},
          {"payoffs", o.payoffs},
          {"seed", o.seed},
          {"timestamp", o.timestamp}};
}

/// Replay a JSONL payoff log into `g`.
inline std::size_t load_log(EmpiricalGame& g, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open payoff log " + path.string());
  std::string line;
  std::size_t n = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed record");
    try {
      g.record_observation(profile_from_json(g, j.at("profile")), j.at("payoffs").get<std::vector<double>>(),
                           j.at("seed").get<std::uint64_t>(), j.value("timestamp", std::int64_t{0}));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    ++n;
  }
  return n;
}

/// Appends one line per observation, flushing each batch.
class LogWriter {
 public:
  LogWriter(const EmpiricalGame& g, const fs::path& path) : g_(g) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    out_.open(path, std::ios::app);
    if (!out_) throw ConfigError("cannot write payoff log " + path.string());
  }
  void operator()(const Observation& o) {
    out_ << observation_to_json(g_, o).dump() << '\n';
    out_.flush();
  }

 private:
  const EmpiricalGame& g_;
  std::ofstream out_;
};

// analysis output ----------------------------------------------------------

inline json mixture_to_json(const EmpiricalGame& g, const MixedProfile& q) {
  json j = json::object();
  for (std::size_t r = 0; r < q.roles.size(); ++r) {
    json m = json::object();
    for (const auto& [s, p] : q.roles[r]) m[g.strategy(r, s).id] = p;
    j[g.role(r).name] = m;
  }
  return j;
}

inline MixedProfile mixture_from_json(const EmpiricalGame& g, const json& j) {
  MixedProfile q;
  q.roles.resize(g.role_count());
  for (const auto& [name, m] : j.items()) {
    const auto r = g.role_index(name);
    for (const auto& [id, p] : m.items()) {
      const auto s = g.find_strategy(r, id);
      if (!s) throw DataError("unknown strategy '" + id + "' in role " + name);
      q.roles[r][*s] = p.get<double>();
    }
  }
  return q;
}

inline json compliance_fractions(const EmpiricalGame& g, const MixedProfile& q, const ComplianceSpec& spec) {
  return {{"role", compliant_fraction(g, q, spec, WeightScheme::role)},
          {"player", compliant_fraction(g, q, spec, WeightScheme::player)},
          {"node", compliant_fraction(g, q, spec, WeightScheme::node)}};
}

inline json candidate_to_json(const EmpiricalGame& g, const Candidate& c, const ComplianceSpec* spec = nullptr) {
  json j{{"mixture", mixture_to_json(g, c.mixture)},
         {"regret", c.regret},
         {"status", to_string(c.status)},
         {"best_response", nullptr}};
  if (c.best_response >= 0)
    j["best_response"] = {{"role", g.role(c.br_role).name}, {"strategy", g.strategy(c.br_role, c.best_response).id}};
  if (spec) j["compliance"] = compliance_fractions(g, c.mixture, *spec);
  return j;
}

inline json candidate_set_to_json(const EmpiricalGame& g, const CandidateSet& X, const ComplianceSpec* spec = nullptr) {
  json cands = json::array();
  for (const auto* list : {&X.confirmed, &X.unconfirmed, &X.refuted})
    for (const auto& c : *list) cands.push_back(candidate_to_json(g, c, spec));
  json j{{"candidates", cands}, {"subgames", X.subgames.size()}};
  if (X.subgames.empty()) j["note"] = "no complete subgames";
  return j;
}

inline json catalog_to_json(const EmpiricalGame& g, const ComplianceSpec& spec) {
  json cat = json::array();
  for (std::size_t r = 0; r < g.role_count(); ++r)
    for (std::size_t i = 0; i < g.catalog_size(r); ++i) {
      auto sj = strategy_to_json(g.strategy(r, static_cast<int>(i)), &spec);
      sj["candidate"] = g.is_candidate(r, static_cast<int>(i));
      cat.push_back(sj);
    }
  return cat;
}

inline json search_report(const EmpiricalGame& g, const SearchResult& res, const ComplianceSpec& spec) {
  json sols = json::array();
  for (const auto& s : res.solutions) {
    json tried = json::array();
    for (const auto& [r, m] : s.tried) tried.push_back({{"role", g.role(r).name}, {"mode", to_string(m)}});
    sols.push_back({{"mixture", mixture_to_json(g, s.profile)},
                    {"regret", s.regret},
                    {"status", s.closed ? "closed" : "open"},
                    {"tried", tried},
                    {"compliance", compliance_fractions(g, s.profile, spec)}});
  }
  return {{"status", res.status},
          {"outer_iterations", res.outer_iterations},
          {"inner_loops", res.inner_loops},
          {"solutions", sols},
          {"catalog", catalog_to_json(g, spec)}};
}

inline json progress_to_json(const ProgressRecord& p) {
  return {{"iteration", p.iteration},
          {"num_candidates_by_status",
           {{"confirmed", p.confirmed}, {"unconfirmed", p.unconfirmed}, {"refuted", p.refuted}}},
          {"profiles_evaluated", p.profiles_evaluated},
          {"sims_run", p.sims_run}};
}

// IBR scenario ----------------------------------------------------------------

inline ibr::TargetSet target_set_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "servers-only" || s == "servers_only") return ibr::TargetSet::servers_only;
  if (s == "clients-and-servers" || s == "clients_and_servers") return ibr::TargetSet::clients_and_servers;
  throw ConfigError("unknown target set '" + s + "'");
}

inline const char* to_string(ibr::TargetSet t) {
  return t == ibr::TargetSet::servers_only ? "servers-only" : "clients-and-servers";
}

struct Scenario {
  ibr::NetworkConfig network;
  ibr::PayoffWeights weights;
};

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  auto& c = s.network;
  try {
    c.n_roots = j.value("N_R", c.n_roots);
    c.n_isps = j.value("N_I", c.n_isps);
    c.clients_per_isp = j.value("c_per_isp", c.clients_per_isp);
    c.n_attackers = j.value("n_a", c.n_attackers);
    c.n_rep_attackers = j.value("n_ra", c.n_rep_attackers);
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("attack_targets")) c.attack_targets = target_set_from_json(j["attack_targets"]);
    if (j.contains("rep_attack_targets")) c.rep_attack_targets = target_set_from_json(j["rep_attack_targets"]);
    if (j.contains("probabilities")) {
      const auto& p = j["probabilities"];
      c.prob.attack = p.value("attack", c.prob.attack);
      c.prob.detect = p.value("detect", c.prob.detect);
      c.prob.success_undetected = p.value("success_undetected", c.prob.success_undetected);
      c.prob.false_positive = p.value("false_positive", c.prob.false_positive);
    }
    c.sleep_max = j.value("sleep_max", c.sleep_max);
    c.attacker_sleep_max = j.value("attacker_sleep_max", c.attacker_sleep_max);
    c.transit = j.value("transit", c.transit);
    c.intro_latency = j.value("intro_latency", c.intro_latency);
    c.report_latency = j.value("report_latency", c.report_latency);
    c.reputation_half_life = j.value("reputation_half_life", c.reputation_half_life);
    c.false_report_prob = j.value("false_report_prob", c.false_report_prob);
    if (j.contains("calibration")) {
      c.calibration_messages = j["calibration"].value("messages_per_client", c.calibration_messages);
      if (j["calibration"].contains("band")) c.calibration_band = j["calibration"]["band"].get<std::array<double, 2>>();
    }
    if (j.contains("payoff_weights")) {
      const auto& w = j["payoff_weights"];
      auto& pw = s.weights;
      pw.v_msg = w.value("v_msg", pw.v_msg);
      pw.v_recv = w.value("v_recv", pw.v_recv);
      pw.p_attack = w.value("p_attack", pw.p_attack);
      pw.c_conn = w.value("c_conn", pw.c_conn);
      pw.c_intro = w.value("c_intro", pw.c_intro);
      pw.v_fee = w.value("v_fee", pw.v_fee);
      pw.p_liability = w.value("p_liability", pw.p_liability);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  c.validate();
  return s;
}

inline json scenario_to_json(const Scenario& s) {
  const auto& c = s.network;
  const auto& w = s.weights;
  return {{"N_R", c.n_roots},
          {"N_I", c.n_isps},
          {"c_per_isp", c.clients_per_isp},
          {"n_a", c.n_attackers},
          {"n_ra", c.n_rep_attackers},
          {"horizon", c.horizon},
          {"attack_targets", to_string(c.attack_targets)},
          {"rep_attack_targets", to_string(c.rep_attack_targets)},
          {"probabilities",
           {{"attack", c.prob.attack},
            {"detect", c.prob.detect},
            {"success_undetected", c.prob.success_undetected},
            {"false_positive", c.prob.false_positive}}},
          {"sleep_max", c.sleep_max},
          {"attacker_sleep_max", c.attacker_sleep_max},
          {"transit", c.transit},
          {"intro_latency", c.intro_latency},
          {"report_latency", c.report_latency},
          {"reputation_half_life", c.reputation_half_life},
          {"false_report_prob", c.false_report_prob},
          {"calibration", {{"messages_per_client", c.calibration_messages}, {"band", c.calibration_band}}},
          {"payoff_weights",
           {{"v_msg", w.v_msg},
            {"v_recv", w.v_recv},
            {"p_attack", w.p_attack},
            {"c_conn", w.c_conn},
            {"c_intro", w.c_intro},
            {"v_fee", w.v_fee},
            {"p_liability", w.p_liability}}}};
}

inline json sim_result_to_json(const ibr::SimResult& r) {
  const auto& a = r.agg;
  json kinds = json::array();
  for (std::size_t i = 0; i < r.payoff.size(); ++i) kinds.push_back(ibr::to_string(r.topology.kind[i]));
  json chains = json::object();
  for (std::size_t k = 1; k < r.chain_lengths.size(); ++k) chains[std::to_string(k)] = r.chain_lengths[k];
  return {{"node_payoffs", r.payoff},
          {"node_kinds", kinds},
          {"aggregates",
           {{"messages_generated", a.messages_generated},
            {"messages_delivered", a.messages_delivered},
            {"attacks_attempted", a.attacks_attempted},
            {"attacks_detected", a.attacks_detected},
            {"attacks_undetected", a.attacks_undetected},
            {"attacks_succeeded", a.attacks_succeeded},
            {"false_positives", a.false_positives},
            {"false_reports", a.false_reports},
            {"connections_terminated", a.connections_terminated},
            {"events", a.events}}},
          {"messages_per_client", r.messages_per_client()},
          {"intro_chain_lengths", chains},
          {"trace_hash", hex64(r.trace_hash)}};
}

// run config ---------------------------------------------------------------

struct RunConfig {
  json raw;
  fs::path base;
  GameSpec game;
  Scenario scenario;
  SearchConfig search;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  fs::path out_dir = "out";
  /// Relative tau: fraction of the mean all-first-strategy payoff.
  std::optional<double> tau_relative;
  std::optional<fs::path> payoff_log;
};

/// Load a run config: resolve includes, apply environment overrides, build
/// the typed view.
inline RunConfig load_run_config(const fs::path& path, char** env = environ) {
  RunConfig rc;
  rc.base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  rc.raw = load_json(path);
  resolve_includes(rc.raw, rc.base);
  apply_env_overrides(rc.raw, env);
  const json& j = rc.raw;
  try {
    if (!j.contains("game")) throw ConfigError("run config needs a 'game' section");
    rc.game = game_from_json(j["game"]);
    if (j.contains("scenario")) rc.scenario = scenario_from_json(j["scenario"]);
    rc.seed = j.value("seed", rc.seed);
    rc.workers = j.value("workers", std::size_t{0});
    rc.out_dir = j.value("out", std::string("out"));
    if (j.contains("payoff_log")) rc.payoff_log = rc.base / j["payoff_log"].get<std::string>();
    auto& in = rc.search.inner;
    if (j.contains("inner")) {
      const auto& x = j["inner"];
      in.tau = x.value("tau", in.tau);
      if (x.contains("tau_relative")) rc.tau_relative = x["tau_relative"].get<double>();
      in.minsamp = x.value("minsamp", in.minsamp);
      in.mincsamp = x.value("mincsamp", in.mincsamp);
      in.max_profile_budget = x.value("max_profile_budget", in.max_profile_budget);
      if (x.contains("incr_seed")) in.incr_seed = x["incr_seed"].get<std::uint64_t>();
    }
    auto& out = rc.search.outer;
    if (j.contains("outer")) {
      const auto& x = j["outer"];
      out.m = x.value("m", out.m);
      out.m_prime = x.value("m_prime", out.m_prime);
      out.minsamp = x.value("minsamp", out.minsamp);
      out.mincsamp = x.value("mincsamp", out.mincsamp);
      if (x.contains("weights")) out.weights = parse_weight_scheme(x["weights"].get<std::string>());
      if (x.contains("role_rotation"))
        for (const auto& name : x["role_rotation"]) out.role_rotation.push_back(rc.game.game.role_index(name.get<std::string>()));
    } else {
      out.minsamp = in.minsamp;
      out.mincsamp = in.mincsamp;
    }
    if (j.contains("budget")) {
      const auto& b = j["budget"];
      if (b.contains("outer_iterations")) rc.search.max_outer_iterations = b["outer_iterations"].get<std::size_t>();
      if (b.contains("wall_seconds")) rc.search.wall_budget_seconds = b["wall_seconds"].get<double>();
      if (b.contains("profile_cap")) in.max_profile_budget = b["profile_cap"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  rc.search.spec = rc.game.compliance;
  rc.search.inner.validate();
  rc.search.outer.validate();
  return rc;
}

inline json manifest(const RunConfig& rc, const std::string& command) {
  const auto& c = rc.scenario.network;
  return {{"version", kVersion},
          {"command", command},
          {"config_hash", config_hash(rc.raw)},
          {"seed", rc.seed},
          {"config", rc.raw},
          {"calibration",
           {{"messages_per_client", c.calibration_messages}, {"band", c.calibration_band}}},
          {"compiler", __VERSION__},
          {"json_library",
           std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
               std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace cegta::io
