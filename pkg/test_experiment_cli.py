import csv
import json
import math
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import pytest

from experiment_cli import EXIT_CONFIG, EXIT_OK, EXIT_RESOURCE, main

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for name in ("ERWLAB_OUTPUT_DIR", "ERWLAB_THREADS", "ERWLAB_MASTER_SEED"):
        monkeypatch.delenv(name, raising=False)


def _rows(path):
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def test_return_prob_table(tmp_path):
    out = tmp_path / "out"
    code = main(["return-prob", "--dim", "1,2", "--eps", "1.0", "--n", "2", "--out", str(out)])
    assert code == EXIT_OK
    rows = _rows(out / "return-prob" / "return-prob.csv")
    assert [float(r["probability"]) for r in rows] == pytest.approx([0.5, 0.25], abs=1e-12)
    assert len({r["config_hash"] for r in rows}) == 1
    summary = json.loads((out / "return-prob" / "summary.json").read_text(encoding="utf-8"))
    assert summary["subcommand"] == "return-prob"
    assert summary["config"]["return_n"] == "2"
    assert summary["config_hash"] == rows[0]["config_hash"]
    assert (out / "return-prob" / "config.cfg").exists()


def test_oracle_table(tmp_path):
    out = tmp_path / "out"
    code = main(["oracle", "--d", "2", "--n", "2", "--set", "env.beta=0.5", "--out", str(out)])
    assert code == EXIT_OK
    rows = _rows(out / "oracle" / "oracle.csv")
    assert len(rows) == 16
    assert math.isclose(sum(float(r["probability"]) for r in rows), 1.0)
    summary = json.loads((out / "oracle" / "summary.json").read_text(encoding="utf-8"))
    assert summary["results"][0]["tv_direct_girsanov"] < 1e-12


def test_simulate_writes_one_row_per_step(tmp_path):
    out = tmp_path / "out"
    code = main(["simulate", "--d", "3", "--horizon", "20", "--replicates", "2", "--mechanism", "construction",
                 "--out", str(out)])
    assert code == EXIT_OK
    rows = _rows(out / "simulate" / "simulate.csv")
    assert len(rows) == 2 * 21
    assert rows[0]["time"] == "0" and rows[0]["x"] == "0"


def test_config_file_and_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("return_n = 4\ndims = 1\neps = 1.0\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["return-prob", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    rows = _rows(out / "return-prob" / "return-prob.csv")
    assert float(rows[0]["probability"]) == pytest.approx(0.375, abs=1e-12)


@pytest.mark.parametrize("argv", [
    ["speed", "--d", "1"],
    ["sweep", "--set", "nonsense"],
    ["return-prob", "--eps", "0"],
    ["simulate", "--mechanism", "discovery", "--horizon", "5", "--replicates", "2"],
])
def test_config_errors_exit_two(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "out")]) == EXIT_CONFIG


def test_resource_limit_exit_three(tmp_path):
    assert main(["oracle", "--d", "4", "--n", "20", "--out", str(tmp_path / "out")]) == EXIT_RESOURCE


def test_verify_subset(tmp_path):
    out = tmp_path / "out"
    assert main(["verify", "--criteria", "1,5", "--out", str(out)]) == EXIT_OK
    rows = _rows(out / "verify" / "verify.csv")
    assert [r["criterion"] for r in rows] == ["1", "5"]
    assert all(r["passed"] == "true" for r in rows)


@pytest.mark.slow
def test_thread_count_does_not_change_output(tmp_path):
    outputs = []
    for threads in ("1", "4"):
        out = tmp_path / f"t{threads}"
        code = main(["sweep", "--d", "6", "--beta", "0,0.3", "--replicates", "60", "--window", "300",
                     "--seed", "99", "--threads", threads, "--out", str(out)])
        assert code == EXIT_OK
        outputs.append((out / "sweep" / "sweep.csv").read_bytes())
    assert outputs[0] == outputs[1]


def _table_bytes(path):
    """Son iki köken sütunu (config_hash, master_seed) atılmış CSV baytları"""
    return b"\n".join(line.rsplit(b",", 2)[0] if line else line for line in path.read_bytes().split(b"\n"))


@pytest.mark.parametrize("argv,name,golden", [
    (["oracle", "--d", "2", "--n", "2", "--set", "env.beta=0.5"], "oracle", "oracle-d2-n2-beta0.5.csv"),
    (["return-prob", "--dim", "1,2", "--eps", "0.5", "--n", "4"], "return-prob", "return-prob-dim1-2-eps0.5-n4.csv"),
])
def test_tables_match_golden_files(argv, name, golden, tmp_path):
    out = tmp_path / "out"
    assert main(argv + ["--out", str(out)]) == EXIT_OK
    assert _table_bytes(out / name / f"{name}.csv") == (GOLDEN / golden).read_bytes()


def _lazy_return_exact(dim, eps, n):
    dist = {(0,) * dim: Fraction(1)}
    for _ in range(n):
        nxt = defaultdict(Fraction)
        for pos, p in dist.items():
            nxt[pos] += p * (1 - eps)
            for axis in range(dim):
                for sign in (1, -1):
                    moved = list(pos)
                    moved[axis] += sign
                    nxt[tuple(moved)] += p * eps / (2 * dim)
        dist = nxt
    return dist[(0,) * dim]


@pytest.mark.parametrize("method", ["convolution", "quadrature"])
def test_return_prob_matches_exact_rational(method, tmp_path):
    out = tmp_path / "out"
    assert main(["return-prob", "--dim", "3", "--eps", "0.9", "--n", "10", "--method", method,
                 "--out", str(out)]) == EXIT_OK
    row = _rows(out / "return-prob" / "return-prob.csv")[0]
    exact = _lazy_return_exact(3, Fraction(9, 10), 10)
    assert float(row["probability"]) == pytest.approx(float(exact), rel=1e-12)
