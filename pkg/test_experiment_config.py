import json
import math

import pytest

from environment import CoupledPair, Deterministic, IIDLazy, VerticalStationary
from experiment_config import (
    ConfigError,
    ExperimentConfig,
    ResultRecord,
    config_hash,
    emit_config,
    load_config,
    parse_config,
    parse_lines,
    read_config_file,
)

COUPLED_TEXT = """
# eşlenmiş i.i.d. çift
experiment = monotone
d = 12
m = 1
env.kind = coupled
env.lower.kind = iid
env.lower.law = uniform:0,0.15
env.lower.sigma = 0.3
env.upper.kind = iid
env.upper.law = uniform:0.15,0.3
env.upper.sigma = 0.3
t_grid = 0.25,0.5,0.75
"""


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for name in ("ERWLAB_OUTPUT_DIR", "ERWLAB_THREADS", "ERWLAB_MASTER_SEED"):
        monkeypatch.delenv(name, raising=False)


def test_emit_parse_roundtrip():
    for cfg in (ExperimentConfig(), parse_config(COUPLED_TEXT),
                ExperimentConfig(m=math.inf, betas=[0.1, 0.35], master_seed=2 ** 63 + 5)):
        assert parse_config(emit_config(cfg)) == cfg


def test_emitted_keys_are_sorted():
    keys = [line.split(" = ")[0] for line in emit_config(parse_config(COUPLED_TEXT)).splitlines()]
    assert keys == sorted(keys)
    assert "env.lower.law" in keys


def test_infinite_m():
    cfg = parse_config("m = inf\n")
    assert math.isinf(cfg.m)
    assert "m = inf" in emit_config(cfg)
    assert math.isinf(cfg.environment().m)


def test_hash_ignores_scheduling_keys():
    base = ExperimentConfig(master_seed=3)
    assert config_hash(base) == config_hash(ExperimentConfig(master_seed=3, threads=8, output_dir="elsewhere"))
    assert config_hash(base) != config_hash(ExperimentConfig(master_seed=4))


def test_environment_builders():
    cfg = parse_config(COUPLED_TEXT)
    env = cfg.environment(env_seed=9)
    assert isinstance(env, CoupledPair)
    assert isinstance(env.lower, IIDLazy)
    assert env.lower.env_seed == 9
    assert env.sigma == 0.3
    assert isinstance(parse_config("env.beta = 0.3,0.1\nm = 2\n").environment(), Deterministic)
    vertical = parse_config("env.kind = vertical\nenv.law = discrete:0.1,0.2\n").environment()
    assert isinstance(vertical, VerticalStationary)


@pytest.mark.parametrize("text", [
    "d = 1\n",
    "unknown_key = 3\n",
    "m = 0\n",
    "env.kind = iid\n",
    "env.kind = coupled\n",
    "env.kind = iid\nenv.law = normal:0,1\n",
    "betas = 0.1,1.5\n",
    "t_grid = 2\n",
    "method = simpson\n",
    "just a line\n",
    "d = 8\nd.x = 3\n",
])
def test_invalid_configs_raise_config_error(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_parse_lines_comments_and_spacing():
    flat = parse_lines("a = 1   # yorum\n\n  b=two\n")
    assert flat == {"a": "1", "b": "two"}


def test_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("ERWLAB_THREADS", "4")
    monkeypatch.setenv("ERWLAB_MASTER_SEED", "11")
    path = tmp_path / "run.cfg"
    path.write_text("master_seed = 12\nd = 6\n", encoding="utf-8")
    cfg = load_config(path, {"d": "10", "replicates": None})
    assert cfg.threads == 4
    assert cfg.master_seed == 12
    assert cfg.d == 10
    assert cfg.replicates == ExperimentConfig().replicates


def test_json_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"d": 6, "env": {"kind": "iid", "law": "uniform:0,0.2"}}), encoding="utf-8")
    flat = read_config_file(path)
    assert flat["env.law"] == "uniform:0,0.2"
    assert load_config(path).env.kind == "iid"
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "missing.cfg")


def test_result_record_defaults():
    record = ResultRecord(config_hash="abc", experiment="x", subcommand="speed", master_seed=1, stream_id=0)
    dumped = record.model_dump()
    assert dumped["status"] == "ok"
    assert dumped["tool_version"]
