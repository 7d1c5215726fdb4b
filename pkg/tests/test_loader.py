# -*- coding: utf-8 -*-
import json

import pandas as pd
import pytest

import config
from data.distributions import ShiftedPareto
from data.loader import ConfigError, ExperimentConfig, load_config
from util.export import ResultWriter, frame_to_csv_text, write_csv_atomic


# ---------------- 설정 ----------------

def test_defaults():
    cfg = load_config()
    assert cfg == ExperimentConfig()
    assert cfg.distribution == ShiftedPareto(3.0)
    assert cfg.policy_spec.kind == "trunc-switch"
    assert cfg.s_list == config.DEFAULT_S_LIST


def test_json_file_and_overrides(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"lambda": 0.5, "dist": "exp:rate=1", "s": [1, 3], "n": 200, "seed": 5}))
    cfg = load_config(path, {"seed": 9, "workers": None})
    assert cfg.lam == 0.5
    assert cfg.s_list == (1.0, 3.0)
    assert cfg.n_periods == 200
    assert cfg.seed == 9
    assert cfg.workers == config.DEFAULT_WORKERS


@pytest.mark.parametrize("value, expected", [(2, (2.0,)), ("1, 2,4", (1.0, 2.0, 4.0)), ([0.5, 8], (0.5, 8.0))])
def test_s_list_forms(value, expected):
    assert load_config(overrides={"s": value}).s_list == expected


@pytest.mark.parametrize("overrides", [
    {"lambda": 2.0},
    {"lambda": 0.0},
    {"dist": "pareto:alpha=1.5", "lambda": 0.5},
    {"dist": "weibull:k=2"},
    {"policy": "ps"},
    {"reference": "po-lcfs"},
    {"s": [2, 1]},
    {"s": [0, 1]},
    {"s": []},
    {"n": 0},
    {"n": 2.5},
    {"confidence": 1.0},
    {"workers": 0},
    {"bogus": 1},
    {"lambda": "fast"},
])
def test_invalid_configs(overrides):
    with pytest.raises(ConfigError):
        load_config(overrides=overrides)


def test_stability_check_optional():
    overrides = {"dist": "exp:rate=1"}
    with pytest.raises(ConfigError):
        load_config(overrides=overrides)
    cfg = load_config(overrides=overrides, require_stable=False)
    assert cfg.lam * cfg.distribution.mean() == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        load_config(overrides={"lambda": -1.0}, require_stable=False)


def test_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{lambda: 1")
    with pytest.raises(ConfigError):
        load_config(broken)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(listed)


# ---------------- CSV 출력 ----------------

def test_csv_format():
    df = pd.DataFrame({"s": [1.0, 2.0], "g": [1 / 3, float("nan")], "verdict": ["PASS", "N/A"]})
    text = frame_to_csv_text(df)
    assert text == "s,g,verdict\n1,0.333333333333,PASS\n2,N/A,N/A\n"


def test_atomic_write_replaces(tmp_path):
    path = tmp_path / "sub" / "out.csv"
    write_csv_atomic(pd.DataFrame({"a": [1]}), path)
    write_csv_atomic(pd.DataFrame({"a": [2]}), path)
    assert path.read_text() == "a\n2\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.csv"]


def test_result_writer(tmp_path):
    writer = ResultWriter(tmp_path)
    writer.add("bounds", pd.DataFrame({"s": [1.0]}))
    with pytest.raises(KeyError):
        writer.add("plots", pd.DataFrame())
    assert (tmp_path / "bounds.csv").exists() is False
    written = writer.flush()
    assert [p.name for p in written] == ["bounds.csv"]
    assert writer.flush() == []
