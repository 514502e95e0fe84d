import hashlib
import json
from pathlib import Path

import pytest

from classical_market import ParseError, ValidationError
from classical_market.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from classical_market.harness import build_config, config_hash, parse_config, repetition_seed, run

POP_CSV = "side,limit,quantity\nB,10,1\nB,8,1\nB,6,1\nS,5,1\nS,7,1\nS,9,1\n"

SCENARIOS = {
    "curves": {"population": {"buyers": [10, [8, 2], 6], "sellers": [5, 7, 9]}},
    "cov": {"population": {"buyers": [10, 8, 6], "sellers": [5, 7, 9]}},
    "garnier": {"garnier": {"wealth": {"kind": "triangular", "a": 0, "mode": 0, "b": 100}, "fraction": 0.5, "n": 200}},
    "auction": {
        "repetitions": 2,
        "population": {
            "generate": {
                "buyers": {"wealth": {"kind": "uniform", "a": 0, "b": 100}, "n": 6},
                "sellers": {"costs": {"kind": "uniform", "a": 0, "b": 100}, "n": 6},
            }
        },
        "session": {"periods": 2, "steps_per_period": 200, "policy": "adaptive"},
    },
    "asset": {
        "asset": {
            "mode": "speculative",
            "n_fundamental": 6,
            "n_speculators": 10,
            "rounds": 8,
            "steps_per_round": 300,
            "credit": {"start": 110, "growth": 0.1, "freeze_round": 5},
        }
    },
}


def hashes(root: Path) -> dict:
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(root.rglob("*")) if p.is_file()}


def test_minimal_config():
    cfg = parse_config("command: cov\nseed: 42\npopulation: {buyers: [1], sellers: [2]}\n")
    assert cfg.seed == 42 and cfg.command == "cov"


def test_missing_seed_is_named():
    with pytest.raises(ValidationError) as exc:
        parse_config("command: asset\n")
    assert ("seed", "field required") in exc.value.errors


def test_negative_tick_is_rejected():
    with pytest.raises(ValidationError) as exc:
        parse_config("command: asset\nseed: 1\nasset: {tick: -0.01}\n")
    assert [path for path, _ in exc.value.errors] == ["asset.tick"]


def test_all_errors_are_reported():
    text = "command: auction\nseed: -3\nsession: {tick: 0, periods: 0}\npopulation: {buyers: [1], sellers: [2]}\n"
    with pytest.raises(ValidationError) as exc:
        parse_config(text)
    paths = {path for path, _ in exc.value.errors}
    assert {"seed", "session.tick", "session.periods"} <= paths


def test_schema_rejects_typos_and_ambiguous_sources():
    with pytest.raises(ValidationError) as exc:
        parse_config("command: cov\nseed: 1\nsead: 2\npopulation: {buyers: [1]}\n")
    assert "sead" in str(exc.value)
    with pytest.raises(ValidationError, match="exactly one"):
        parse_config("command: cov\nseed: 1\npopulation: {csv: a.csv, buyers: [1]}\n")
    with pytest.raises(ValidationError, match="population"):
        parse_config("command: cov\nseed: 1\n")
    with pytest.raises(ValidationError, match="credit"):
        parse_config("command: asset\nseed: 1\nasset: {mode: speculative, n_speculators: 2}\n")


def test_malformed_text_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_config("command: [cov\nseed: 1")
    with pytest.raises(ValidationError):
        parse_config("- just\n- a list\n")


def test_overrides_and_hash():
    base = {"seed": 1, "population": {"buyers": [1], "sellers": [2]}}
    a = build_config(base, "cov", {"seed": 7, "out": "x"})
    b = build_config(base, "cov", {"seed": 7, "out": "y"})
    assert a.seed == 7
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(build_config(base, "cov"))
    with pytest.raises(ValidationError):
        build_config({"command": "cov", **base}, "asset")


def test_cov_reproduces_the_basic_example(tmp_path):
    cfg = build_config(SCENARIOS["cov"], "cov", {"seed": 0, "out": str(tmp_path)})
    manifest = run(cfg)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary == {"low": 7, "high": 8, "min_rent": 6, "cleared_quantity": 2}
    assert manifest.summary == summary


@pytest.mark.parametrize("command", sorted(SCENARIOS))
def test_runs_are_byte_identical_and_manifests_complete(tmp_path, command):
    roots = []
    for name in ("a", "b"):
        cfg = build_config(SCENARIOS[command], command, {"seed": 11, "out": str(tmp_path / name)})
        run(cfg)
        roots.append(tmp_path / name)
    first, second = hashes(roots[0]), hashes(roots[1])
    assert first == second
    manifest = json.loads((roots[0] / "manifest.json").read_text())
    listed = {f["path"]: f["sha256"] for f in manifest["files"]}
    assert listed == {k: v for k, v in first.items() if k != "manifest.json"}
    assert manifest["seed"] == 11 and manifest["command"] == command
    assert "summary.json" in listed


def test_jobs_do_not_change_outputs(tmp_path):
    for jobs in (1, 2):
        cfg = build_config(SCENARIOS["auction"], "auction", {"seed": 3, "out": str(tmp_path / str(jobs))})
        run(cfg, jobs=jobs)
    assert hashes(tmp_path / "1") == hashes(tmp_path / "2")
    assert (tmp_path / "1" / "rep_001" / "events.csv").exists()


def test_repetition_seeds_are_distinct_and_stable():
    seeds = [repetition_seed(5, i) for i in range(50)]
    assert len(set(seeds)) == 50 and seeds == [repetition_seed(5, i) for i in range(50)]


def test_output_contracts(tmp_path):
    cfg = build_config(SCENARIOS["curves"], "curves", {"seed": 0, "out": str(tmp_path / "c")})
    run(cfg)
    lines = (tmp_path / "c" / "curves.csv").read_text().splitlines()
    assert lines[0] == "price,demand,supply,excess_supply,potential_rent"
    assert lines[1] == "5,4,1,-3,12"
    cfg = build_config(SCENARIOS["asset"], "asset", {"seed": 0, "out": str(tmp_path / "a")})
    summary = run(cfg).summary
    assert {"kurtosis", "hill_alpha", "acf_abs"} <= set(summary)
    assert set(summary["acf_abs"]) == {"1", "5", "10"}
    assert (tmp_path / "a" / "prices.csv").read_text().startswith("round,close\n1,")
    assert (tmp_path / "a" / "returns.csv").read_text().startswith("round,log_return\n2,")


def test_cli_cov_prints_json(tmp_path, capsys):
    pop = tmp_path / "pop.csv"
    pop.write_text(POP_CSV)
    code = main(["cov", "--population", str(pop), "--seed", "42", "--out", str(tmp_path / "o")])
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"low": 7, "high": 8, "min_rent": 6, "cleared_quantity": 2}
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["seed"] == 42


def test_cli_seed_flag_overrides_config(tmp_path, capsys):
    conf = tmp_path / "c.yaml"
    conf.write_text("seed: 1\npopulation: {buyers: [3], sellers: [1]}\n")
    assert main(["cov", "--config", str(conf), "--seed", "99", "--out", str(tmp_path / "o")]) == EXIT_OK
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["seed"] == 99


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["bogus"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    assert main(["cov", "--jobs", "0"]) == EXIT_USAGE
    assert main(["cov", "--population", "nowhere.csv"]) == EXIT_CONFIG
    assert main(["cov", "--population", "nowhere.csv", "--seed", "1", "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    bad = tmp_path / "bad.yaml"
    bad.write_text("seed: [1\n")
    assert main(["asset", "--config", str(bad)]) == EXIT_CONFIG
    buyers_only = tmp_path / "b.csv"
    buyers_only.write_text("side,limit,quantity\nB,10,1\n")
    assert main(["auction", "--population", str(buyers_only), "--seed", "1", "--out", str(tmp_path / "y")]) == EXIT_RUNTIME
    assert "auction" in capsys.readouterr().err
