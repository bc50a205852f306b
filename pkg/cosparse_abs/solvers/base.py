# cosparse_abs/solvers/base.py
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from ..config import section
from ..errors import ConfigError, ContractViolation
from ..io_types import FloatArray, JSONDict
from ..utils.parsing import normalize


class SolverKind(str, Enum):
    OMP_K = "omp-k"
    OMP_EPS = "omp-eps"
    TST = "tst"
    BP = "bp"
    GAP = "gap"
    ORACLE_SYNTHESIS = "oracle-synthesis"
    ORACLE_ANALYSIS = "oracle-analysis"

    @property
    def is_synthesis(self) -> bool:
        return self not in (SolverKind.GAP, SolverKind.ORACLE_ANALYSIS)


_ALIASES: Dict[str, SolverKind] = {
    "ompk": SolverKind.OMP_K,
    "omp-epsilon": SolverKind.OMP_EPS,
    "ompeps": SolverKind.OMP_EPS,
    "sp": SolverKind.TST,
    "subspace-pursuit": SolverKind.TST,
    "basis-pursuit": SolverKind.BP,
    "l1": SolverKind.BP,
    "greedy-analysis-pursuit": SolverKind.GAP,
    "oracle-s": SolverKind.ORACLE_SYNTHESIS,
    "oracle-a": SolverKind.ORACLE_ANALYSIS,
}

def resolve_kind(token: Any) -> SolverKind:
    if isinstance(token, SolverKind):
        return token
    key = normalize(str(token))
    try:
        return SolverKind(key)
    except ValueError:
        pass
    if key in _ALIASES:
        return _ALIASES[key]
    known = ", ".join(k.value for k in SolverKind)
    raise ConfigError(f"unknown solver {token!r} (known: {known})")


@dataclass(frozen=True)
class BpTolerances:
    duality_gap: float = 1e-10   # relative to max(1, ||gamma||_1)
    newton_tol: float = 1e-14    # reciprocal condition of the Newton matrix below which the loop stops
    max_newton: int = 100
    max_backtrack: int = 32


@dataclass(frozen=True)
class SolverConfig:
    kind: SolverKind
    k: Optional[int] = None                 # OMP-k atoms / TST sparsity; None -> N - l
    eps_residual: float = 1e-9
    max_iterations: Optional[int] = None    # None -> min(rows, cols)
    alpha: Optional[int] = None             # TST stage-1 width, None -> k
    beta: Optional[int] = None              # TST stage-2 width, None -> k
    kappa: float = 1.0                      # TST proxy step
    bp: BpTolerances = field(default_factory=BpTolerances)
    gap_stop_tol: float = 1e-9
    max_combinations: int = 10_000_000
    feasibility_tol: float = 1e-8
    subspace_block: str = "basis"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", resolve_kind(self.kind))
        if self.k is not None and self.k < 0:
            raise ContractViolation(f"k must be non-negative, got {self.k}")
        if self.kind is SolverKind.OMP_EPS and not self.eps_residual > 0:
            raise ContractViolation("OMP-eps needs eps_residual > 0")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ContractViolation("max_iterations must be non-negative")

    @property
    def name(self) -> str:
        return self.kind.value

    def with_k(self, k: Optional[int]) -> "SolverConfig":
        return replace(self, k=k)

    @classmethod
    def from_config(cls, kind: Any, cfg: JSONDict) -> "SolverConfig":
        bp = section(cfg, "solvers.bp", {}) or {}
        tst = section(cfg, "solvers.tst", {}) or {}
        return cls(
            kind=resolve_kind(kind),
            eps_residual=float(section(cfg, "solvers.eps_residual", 1e-9)),
            max_iterations=section(cfg, "solvers.max_iterations"),
            alpha=tst.get("alpha"),
            beta=tst.get("beta"),
            kappa=float(tst.get("kappa", 1.0)),
            bp=BpTolerances(
                duality_gap=float(bp.get("duality_gap", 1e-10)),
                newton_tol=float(bp.get("newton_tol", 1e-14)),
                max_newton=int(bp.get("max_newton", 100)),
                max_backtrack=int(bp.get("max_backtrack", 32)),
            ),
            gap_stop_tol=float(section(cfg, "solvers.gap.stop_tol", 1e-9)),
            max_combinations=int(section(cfg, "solvers.oracle.max_combinations", 10_000_000)),
            feasibility_tol=float(section(cfg, "solvers.oracle.feasibility_tol", 1e-8)),
            subspace_block=str(section(cfg, "abs.subspace_block", "basis")),
        )


@dataclass
class SolveOutcome:
    """What every solver function returns; `coef` is the recovered vector."""
    coef: FloatArray
    iterations: int
    residual_norm: float
    converged: bool
    flag: Optional[str] = None
    residual_history: List[float] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)


def top_indices(values: FloatArray, count: int) -> np.ndarray:
    """Indices of the `count` largest values; ties go to the lowest index."""
    order = np.argsort(-values, kind="stable")
    return order[: max(0, count)]

def check_system(a: FloatArray, y: FloatArray) -> None:
    if a.shape[0] != y.shape[0]:
        raise ContractViolation(f"system has {a.shape[0]} rows but y has length {y.shape[0]}")
