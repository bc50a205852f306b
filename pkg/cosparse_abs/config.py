# cosparse_abs/config.py
from __future__ import annotations

import json
import os
import threading
from typing import Any, Optional

from .errors import ConfigError
from .io_types import JSONDict

SHIPPED_CONFIG_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "config.json")
CONFIG_PATH = os.environ.get("ABS_CONFIG_PATH", SHIPPED_CONFIG_PATH)

# 0.05, 0.10, ..., 0.95
GRID_DEFAULT = [round(0.05 * i, 2) for i in range(1, 20)]

DEFAULT_CFG: JSONDict = {
    "numerics": {
        "rank_rtol": None,  # None -> max(rows, cols) * eps
    },
    "model": {
        "cosupport_tol": 1e-8,
        "max_redraws": 50,
    },
    "abs": {
        "subspace_block": "basis",
    },
    "solvers": {
        "eps_residual": 1e-9,
        "max_iterations": None,
        "tst": {"alpha": None, "beta": None, "kappa": 1.0},
        "bp": {"duality_gap": 1e-10, "newton_tol": 1e-14, "max_newton": 100, "max_backtrack": 32},
        "gap": {"stop_tol": 1e-9},
        "oracle": {"max_combinations": 10_000_000, "feasibility_tol": 1e-8},
    },
    "bench": {
        "d": 200,
        "n_rows": 240,
        "delta_values": GRID_DEFAULT,
        "rho_values": GRID_DEFAULT,
        "trials_per_cell": 100,
        "success_tol": 1e-6,
        "master_seed": 0,
        "jobs": 1,
        "solvers": ["omp-k", "omp-eps", "tst", "bp", "gap"],
        "regenerate_operator": False,
    },
}

_lock = threading.Lock()

def _copy(cfg: JSONDict) -> JSONDict:
    return json.loads(json.dumps(cfg))

def _deep_merge(dst: JSONDict, src: JSONDict) -> JSONDict:
    merged = _copy(dst)
    for key, val in (src or {}).items():
        if isinstance(val, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], val)
        else:
            merged[key] = val
    return merged

def _validate(cfg: JSONDict) -> None:
    for name in DEFAULT_CFG:
        if not isinstance(cfg.get(name), dict):
            raise ConfigError(f"config section '{name}' must be an object")
    block = cfg["abs"].get("subspace_block")
    if block not in ("basis", "projector"):
        raise ConfigError(f"abs.subspace_block must be 'basis' or 'projector', got {block!r}")
    bench = cfg["bench"]
    for key in ("d", "n_rows", "trials_per_cell", "jobs", "master_seed"):
        if not isinstance(bench.get(key), int) or bench[key] < 0:
            raise ConfigError(f"bench.{key} must be a non-negative integer")
    for key in ("delta_values", "rho_values"):
        vals = bench.get(key)
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and 0 < v <= 1 for v in vals):
            raise ConfigError(f"bench.{key} must be a list of reals in (0, 1]")

def load_config(path: Optional[str] = None) -> JSONDict:
    path = path or CONFIG_PATH
    if not os.path.exists(path):
        return _copy(DEFAULT_CFG)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    cfg = _deep_merge(DEFAULT_CFG, raw)
    _validate(cfg)
    return cfg

def save_config(cfg: JSONDict, path: Optional[str] = None) -> None:
    path = path or CONFIG_PATH
    with _lock:
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(cfg, f, ensure_ascii=False, indent=2)

def section(cfg: JSONDict, dotted: str, default: Any = None) -> Any:
    node: Any = cfg
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    return node

def apply_config(cfg: JSONDict) -> None:
    """Push module-level numeric constants; also used as worker initializer."""
    from . import model, numerics

    numerics.RANK_RTOL = section(cfg, "numerics.rank_rtol")
    model.COSUPPORT_TOL = float(section(cfg, "model.cosupport_tol", model.COSUPPORT_TOL))
    model.MAX_REDRAWS = int(section(cfg, "model.max_redraws", model.MAX_REDRAWS))
