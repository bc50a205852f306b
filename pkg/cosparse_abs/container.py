# cosparse_abs/container.py
"""
Instance container: a text file whose first line is

    COSPARSE-ABS-INSTANCE <version>

followed by one JSON object holding the operator, the measurement matrix,
the ground truth, the measurements and the seed. Floats are written with
their shortest round-trip representation, so a reload is bit-exact.
"""
from __future__ import annotations

import json
from typing import Tuple

import numpy as np

from .errors import AbsError, ContainerError
from .io_types import JSONDict
from .model import AnalysisOperator, CosparseInstance, Cosupport, RngSeed
from .utils.io_helpers import ensure_parent, now_iso

MAGIC = "COSPARSE-ABS-INSTANCE"
VERSION = 1


def instance_payload(op: AnalysisOperator, inst: CosparseInstance) -> JSONDict:
    return {
        "created_at_iso": now_iso(),
        "n_rows": op.n_rows,
        "dim": op.dim,
        "m": inst.m,
        "l": inst.l,
        "delta": inst.delta,
        "rho": inst.rho,
        "seed": None if inst.seed is None else {"seed": inst.seed.seed, "path": list(inst.seed.path)},
        "cosupport": list(inst.cosupport.indices),
        "omega": op.omega.tolist(),
        "m_mat": inst.m_mat.tolist(),
        "x": inst.x.tolist(),
        "y": inst.y.tolist(),
    }

def save_instance(path: str, op: AnalysisOperator, inst: CosparseInstance) -> None:
    ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{MAGIC} {VERSION}\n")
        json.dump(instance_payload(op, inst), f, separators=(",", ":"))
        f.write("\n")

def _array(payload: JSONDict, key: str, shape: Tuple[int, ...]) -> np.ndarray:
    try:
        arr = np.asarray(payload[key], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise ContainerError(f"field '{key}' missing or not numeric") from e
    if arr.shape != shape:
        raise ContainerError(f"field '{key}' has shape {arr.shape}, expected {shape}")
    return arr

def load_instance(path: str) -> Tuple[AnalysisOperator, CosparseInstance]:
    with open(path, "r", encoding="utf-8") as f:
        head = f.readline().split()
        if len(head) != 2 or head[0] != MAGIC:
            raise ContainerError(f"{path}: not an instance file (bad magic)")
        if head[1] != str(VERSION):
            raise ContainerError(f"{path}: unsupported container version {head[1]}")
        try:
            payload = json.load(f)
        except json.JSONDecodeError as e:
            raise ContainerError(f"{path}: {e}") from e
    try:
        n_rows, dim, m = int(payload["n_rows"]), int(payload["dim"]), int(payload["m"])
        seed_raw = payload.get("seed")
        seed = None if seed_raw is None else RngSeed(int(seed_raw["seed"]), tuple(int(k) for k in seed_raw["path"]))
        omega = _array(payload, "omega", (n_rows, dim))
        m_mat = _array(payload, "m_mat", (m, dim))
        x = _array(payload, "x", (dim,))
        y = _array(payload, "y", (m,))
        op = AnalysisOperator.from_omega(omega)
        inst = CosparseInstance(
            x=x,
            cosupport=Cosupport.from_indices(payload["cosupport"], n_rows),
            m_mat=m_mat,
            y=y,
            delta=float(payload["delta"]),
            rho=float(payload["rho"]),
            seed=seed,
        )
    except ContainerError:
        raise
    except (KeyError, TypeError, ValueError, AbsError) as e:
        raise ContainerError(f"{path}: invalid payload: {e}") from e
    return op, inst
