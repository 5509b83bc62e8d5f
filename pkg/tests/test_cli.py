import json
from pathlib import Path

import pytest

from netimmune.cli import main
from netimmune.config import parse_config
from netimmune.experiments import architecture, arms_race, reference

ROOT = Path(__file__).parent.parent
CONFIGS = sorted((ROOT / "configs").glob("*.cfg"))

SMALL = """\
world.endpoints = 20
world.routers = 4
run.horizon = 15
defense.architectures = router_filter
"""


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL)
    return path


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.name)
def test_shipped_configs_validate(path, capsys):
    assert main(["validate", "--config", str(path)]) == 0
    assert "ok" in capsys.readouterr().out


def test_shipped_configs_match_the_experiment_presets():
    load = lambda name: parse_config((ROOT / "configs" / name).read_text())
    assert load("reference.cfg") == reference()
    assert load("router_filter.cfg") == architecture("router_filter")
    assert load("arms_race.cfg") == arms_race(adaptive=True)


@pytest.mark.parametrize("a,b,r,expected", [
    ("ff", "fe", 7, "true"), ("ff", "fe", 8, "false"), ("0f0f", "0f0f", 16, "true"), ("a5", "5a", 1, "false"),
])
def test_oracle_match(a, b, r, expected, capsys):
    assert main(["oracle", "match", "--a", a, "--b", b, "--r", str(r)]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_oracle_rejects_length_mismatch(capsys):
    assert main(["oracle", "match", "--a", "ff", "--b", "fff", "--r", "2"]) == 1


def test_unknown_flag_exits_one(small_cfg, capsys):
    assert main(["run", "--config", str(small_cfg), "--out", "x", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_invalid_config_lists_every_error(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("world.L = 100\nstrain.beta = -1\nnot.a.key = 3\n")
    assert main(["validate", "--config", str(bad)]) == 1
    err = capsys.readouterr().err
    assert err.count("config error") >= 3


def test_missing_config_exits_one(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_run_writes_outputs(small_cfg, tmp_path):
    out = tmp_path / "res"
    assert main(["run", "--config", str(small_cfg), "--seed", "3", "--out", str(out)]) == 0
    summary = json.loads((tmp_path / "res.json").read_text())
    assert summary["status"] in {"eliminated", "persisting"}
    assert (tmp_path / "res.csv").read_text().startswith("step,")


def test_repeated_runs_give_identical_files(small_cfg, tmp_path):
    for name in ("a", "b"):
        assert main(["run", "--config", str(small_cfg), "--seed", "9", "--out", str(tmp_path / name / "r"),
                     "--replicates", "3"]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == [f"r_rep{i:03d}.{ext}" for i in range(3) for ext in ("csv", "json")]
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_writes_an_index(small_cfg, tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(small_cfg), "--param", "strain.beta", "--values", "0,2",
                 "--seed", "1", "--out", str(out)]) == 0
    index = json.loads((tmp_path / "sw_index.json").read_text())
    assert [r["value"] for r in index["runs"]] == ["0", "2"]
    assert all((tmp_path / r["csv"]).exists() for r in index["runs"])


def test_sweep_bad_value_exits_one(small_cfg, tmp_path):
    assert main(["sweep", "--config", str(small_cfg), "--param", "world.L", "--values", "16,100",
                 "--out", str(tmp_path / "x")]) == 1
