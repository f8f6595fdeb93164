"""Command-line behavior: exit codes, determinism, resume, and report schemas."""

import json
import os
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest

ROOT = Path(os.environ.get("CEGTA_ROOT", Path(__file__).resolve().parents[2]))
BIN = os.environ.get("CEGTA_BIN", str(ROOT / "build" / "cegta"))
CONFIGS = ROOT / "configs"
SCHEMAS = ROOT / "schemas"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def validate(doc, name):
    jsonschema.validate(doc, schema(name), cls=jsonschema.Draft202012Validator)


def run(*args, env=None):
    full_env = {k: v for k, v in os.environ.items() if not k.startswith("CEGTA_")}
    full_env.update(env or {})
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, env=full_env, timeout=600)


def load(path):
    return json.loads(Path(path).read_text())


def jsonl(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


@pytest.fixture
def toy(tmp_path):
    cfg = tmp_path / "cfg"
    shutil.copytree(CONFIGS, cfg, ignore=shutil.ignore_patterns("*env1*", "*env3*"))
    return cfg


def test_schemas_are_valid():
    for f in SCHEMAS.glob("*.schema.json"):
        jsonschema.Draft202012Validator.check_schema(json.loads(f.read_text()))


def test_simulate_is_deterministic(toy, tmp_path):
    a = run("simulate", "--config", toy / "toy.json", "--out", tmp_path / "a", "--seed", 3)
    b = run("simulate", "--config", toy / "toy.json", "--out", tmp_path / "b", "--seed", 3)
    assert a.returncode == 0 and b.returncode == 0, a.stderr + b.stderr
    ra, rb = (tmp_path / "a" / "sim_result.json").read_bytes(), (tmp_path / "b" / "sim_result.json").read_bytes()
    assert ra == rb
    validate(json.loads(ra), "sim_result")
    validate(load(tmp_path / "a" / "manifest.json"), "manifest")


def test_simulate_env2_covers_every_node(toy, tmp_path):
    profile = {"root": ["R-C"], "isp": ["I-C"] * 2, "client": ["C-C"] * 3, "server": ["S-C"] * 2}
    r = run("simulate", "--config", toy / "env2.json", "--out", tmp_path, "--seed", 1, "--profile", json.dumps(profile))
    assert r.returncode == 0, r.stderr
    res = load(tmp_path / "sim_result.json")
    assert len(res["node_payoffs"]) == 633
    assert len(res["player_payoffs"]) == 8


def test_missing_policy_assignment_names_role(toy, tmp_path):
    profile = {"root": ["R-C"], "isp": ["I-C"], "client": ["C-C"]}
    r = run("simulate", "--config", toy / "toy.json", "--out", tmp_path, "--profile", json.dumps(profile))
    assert r.returncode == 1
    assert "server" in r.stderr


def test_unknown_strategy_is_usage_error(toy, tmp_path):
    profile = {"root": ["R-C"], "isp": ["I-C"], "client": ["C-Q"], "server": ["S-C"]}
    r = run("simulate", "--config", toy / "toy.json", "--out", tmp_path, "--profile", json.dumps(profile))
    assert r.returncode == 1
    assert "C-Q" in r.stderr


def test_config_parse_error_reports_line(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "seed": 1,\n  "game": {\n    "roles": [,]\n  }\n}\n')
    r = run("analyze", "--config", bad, "--out", tmp_path / "o")
    assert r.returncode == 1
    assert "bad.json:4:" in r.stderr


def test_missing_role_section_is_config_error(toy, tmp_path):
    game = load(toy / "game_toy.json")
    game["roles"] = [x for x in game["roles"] if x["name"] != "server"]
    (toy / "game_toy.json").write_text(json.dumps(game))
    r = run("analyze", "--config", toy / "toy.json", "--out", tmp_path)
    assert r.returncode == 1
    assert "server" in r.stderr


def test_usage_errors(toy):
    assert run().returncode == 1
    assert run("simulate").returncode == 1
    assert run("simulate", "--config", toy / "missing.json").returncode == 1
    assert run("search", "--config", toy / "toy.json", "--bogus").returncode == 1


def test_analyze_empty_database(toy, tmp_path):
    r = run("analyze", "--config", toy / "toy.json", "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    assert "no complete subgames" in r.stdout
    rep = load(tmp_path / "analysis.json")
    validate(rep, "candidate_report")
    assert rep["note"] == "no complete subgames"


def test_search_outputs_validate_and_resume(toy, tmp_path):
    out = tmp_path / "run"
    r = run("search", "--config", toy / "toy.json", "--out", out)
    assert r.returncode == 0, r.stderr
    rep = load(out / "report.json")
    validate(rep, "search_report")
    validate(load(out / "manifest.json"), "manifest")
    records = jsonl(out / "payoffs.jsonl")
    assert len(records) == rep["sims_run"]
    for rec in records:
        validate(rec, "log_record")
    for rec in jsonl(out / "progress.jsonl"):
        validate(rec, "progress_record")
    assert rep["solutions"]

    status = run("status", "--config", toy / "toy.json", "--out", out)
    assert status.returncode == 0
    st = json.loads(status.stdout)
    assert st["samples"] == len(records)

    analyze = run("analyze", "--config", toy / "toy.json", "--out", out)
    assert analyze.returncode == 0
    validate(load(out / "analysis.json"), "candidate_report")

    # resuming reuses the archive: the same search needs few or no new runs
    again = run("search", "--config", toy / "toy.json", "--out", out)
    assert again.returncode == 0, again.stderr
    assert load(out / "report.json")["sims_run"] < rep["sims_run"]


def test_zero_budget_matches_analysis(toy, tmp_path):
    out = tmp_path / "run"
    r = run("search", "--config", toy / "toy.json", "--out", out, "--budget-iters", 0)
    assert r.returncode == 0, r.stderr
    rep = load(out / "report.json")
    assert rep["status"] == "open solutions remain"
    assert all(s["status"] == "open" for s in rep["solutions"])
    a = run("analyze", "--config", toy / "toy.json", "--out", out)
    assert a.returncode == 0
    confirmed = [c["mixture"] for c in load(out / "analysis.json")["candidates"] if c["status"] == "confirmed"]

    def close(m1, m2):
        return m1.keys() == m2.keys() and all(
            m1[r].keys() == m2[r].keys() and all(abs(m1[r][s] - m2[r][s]) < 1e-3 for s in m1[r]) for r in m1
        )

    assert len(confirmed) == len(rep["solutions"])
    for s in rep["solutions"]:
        assert any(close(s["mixture"], c) for c in confirmed)


def test_env_override_and_flags_reach_manifest(toy, tmp_path):
    r = run("simulate", "--config", toy / "toy.json", "--out", tmp_path / "a", env={"CEGTA_SEED": "17"})
    assert r.returncode == 0, r.stderr
    m = load(tmp_path / "a" / "manifest.json")
    assert m["seed"] == 17 and m["config"]["seed"] == 17
    r = run("simulate", "--config", toy / "toy.json", "--out", tmp_path / "b", "--seed", 17)
    assert load(tmp_path / "b" / "manifest.json")["config_hash"] == m["config_hash"]
    assert load(tmp_path / "a" / "sim_result.json") == load(tmp_path / "b" / "sim_result.json")
    r = run("simulate", "--config", toy / "toy.json", "--out", tmp_path / "c", env={"CEGTA_SCENARIO__HORIZON": "150"})
    assert load(tmp_path / "c" / "manifest.json")["config"]["scenario"]["horizon"] == 150
