# tests/test_config.py
from __future__ import annotations

import json

import pytest

from cosparse_abs import config, model, numerics
from cosparse_abs.errors import ConfigError
from cosparse_abs.utils.io_helpers import retry
from cosparse_abs.utils.parsing import normalize, parse_float_list, parse_name_list


def test_missing_file_gives_defaults(tmp_path):
    cfg = config.load_config(str(tmp_path / "nope.json"))
    assert cfg == config.DEFAULT_CFG
    assert cfg is not config.DEFAULT_CFG


def test_partial_file_is_merged_over_defaults(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"bench": {"d": 50, "n_rows": 60}, "solvers": {"bp": {"max_newton": 40}}}))
    cfg = config.load_config(str(path))
    assert cfg["bench"]["d"] == 50
    assert cfg["bench"]["trials_per_cell"] == 100
    assert cfg["solvers"]["bp"]["max_newton"] == 40
    assert cfg["solvers"]["bp"]["duality_gap"] == 1e-10


@pytest.mark.parametrize("raw", [
    "not json",
    "[1, 2]",
    json.dumps({"abs": {"subspace_block": "other"}}),
    json.dumps({"bench": {"d": -5}}),
    json.dumps({"bench": {"delta_values": [0.5, 1.5]}}),
])
def test_invalid_files_raise_config_error(tmp_path, raw):
    path = tmp_path / "cfg.json"
    path.write_text(raw)
    with pytest.raises(ConfigError):
        config.load_config(str(path))


def test_save_then_load(tmp_path):
    cfg = config.load_config(str(tmp_path / "nope.json"))
    cfg["bench"]["master_seed"] = 77
    path = tmp_path / "sub" / "cfg.json"
    config.save_config(cfg, str(path))
    assert config.load_config(str(path))["bench"]["master_seed"] == 77


def test_section_lookup():
    cfg = config.DEFAULT_CFG
    assert config.section(cfg, "solvers.bp.max_newton") == 100
    assert config.section(cfg, "solvers.nope.x", "fallback") == "fallback"


def test_apply_config_pushes_module_constants(tmp_path):
    cfg = config.load_config(str(tmp_path / "nope.json"))
    cfg["numerics"]["rank_rtol"] = 1e-9
    cfg["model"]["cosupport_tol"] = 1e-7
    config.apply_config(cfg)
    assert numerics.RANK_RTOL == 1e-9
    assert model.COSUPPORT_TOL == 1e-7


def test_shipped_config_matches_defaults():
    assert config.load_config(config.SHIPPED_CONFIG_PATH) == config.DEFAULT_CFG


def test_default_path_finds_shipped_config_from_any_directory(tmp_path, monkeypatch):
    import importlib
    import os

    monkeypatch.chdir(tmp_path)
    assert os.path.isabs(config.SHIPPED_CONFIG_PATH)
    assert os.path.isfile(config.SHIPPED_CONFIG_PATH)

    monkeypatch.delenv("ABS_CONFIG_PATH", raising=False)
    importlib.reload(config)
    assert config.CONFIG_PATH == config.SHIPPED_CONFIG_PATH
    assert config.load_config() == config.DEFAULT_CFG


# ---- Parsing helpers ----
def test_normalize():
    assert normalize("  OMP_Eps ") == "omp-eps"
    assert normalize("omp ε") == "omp-eps"


def test_parse_float_list():
    assert parse_float_list("0.1,0.5,0.9") == [0.1, 0.5, 0.9]
    assert parse_float_list("0.05:0.95:0.05") == config.GRID_DEFAULT
    for bad in ("", "a,b", "0:1", "0:1:-0.1"):
        with pytest.raises(ConfigError):
            parse_float_list(bad)


def test_parse_name_list():
    assert parse_name_list("OMP_k, bp,,GAP") == ["omp-k", "bp", "gap"]


def test_retry_reraises_last_error():
    calls = []

    def flaky():
        calls.append(1)
        if len(calls) < 3:
            raise KeyError(len(calls))
        return "ok"

    assert retry(flaky, attempts=3, catch=(KeyError,)) == "ok"
    calls.clear()
    with pytest.raises(KeyError):
        retry(flaky, attempts=2, catch=(KeyError,))
