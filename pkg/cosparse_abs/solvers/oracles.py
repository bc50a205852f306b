# cosparse_abs/solvers/oracles.py
"""Exhaustive l0 oracles, for verification on small instances only."""
from __future__ import annotations

import logging
from itertools import combinations
from math import comb
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .. import numerics
from ..errors import ContractViolation, EnumerationGuardError
from ..io_types import FloatArray
from ..model import AnalysisOperator
from .base import SolveOutcome, check_system

log = logging.getLogger("cosparse_abs.solvers.oracles")


def _guard(n: int, sizes: Iterable[int], max_combinations: int) -> None:
    for s in sizes:
        count = comb(n, s)
        if count > max_combinations:
            raise EnumerationGuardError(
                f"choose({n}, {s}) = {count} exceeds the enumeration guard of {max_combinations}"
            )


def oracle_synthesis(a, y, k_max: Optional[int] = None, feasibility_tol: float = 1e-8,
                     max_combinations: int = 10_000_000) -> SolveOutcome:
    """Sparsest gamma with ||a gamma - y|| <= tol, by support enumeration in increasing size."""
    a = numerics.as_matrix(a, "a")
    y = numerics.as_vector(y, "y")
    check_system(a, y)
    rows, cols = a.shape
    k_max = min(rows, cols) if k_max is None else k_max
    if not 0 <= k_max <= cols:
        raise ContractViolation(f"k_max must lie in [0, {cols}], got {k_max}")
    _guard(cols, range(k_max + 1), max_combinations)
    tol = feasibility_tol * max(1.0, float(np.linalg.norm(y)))

    tried = 0
    for k in range(k_max + 1):
        feasible: List[Tuple[Tuple[int, ...], FloatArray, float]] = []
        for support in combinations(range(cols), k):
            tried += 1
            cols_s = list(support)
            z = numerics.least_squares(a[:, cols_s], y)
            res = float(np.linalg.norm(a[:, cols_s] @ z - y))
            if res <= tol:
                feasible.append((support, z, res))
        if feasible:
            support, z, res = feasible[0]
            gamma = np.zeros(cols)
            gamma[list(support)] = z
            return SolveOutcome(
                coef=gamma, iterations=tried, residual_norm=res, converged=True,
                extras={"level": k, "unique": len(feasible) == 1, "feasible_count": len(feasible),
                        "support": support},
            )
    log.debug("oracle_synthesis: no feasible support up to k = %d", k_max)
    return SolveOutcome(
        coef=np.zeros(cols), iterations=tried, residual_norm=float(np.linalg.norm(y)),
        converged=False, flag="no_feasible_support",
        extras={"level": None, "unique": False, "feasible_count": 0, "support": ()},
    )


def oracle_analysis(op: AnalysisOperator, m_mat, y, l_min: int = 0, feasibility_tol: float = 1e-8,
                    max_combinations: int = 10_000_000) -> SolveOutcome:
    """Most cosparse x with y = M x, by cosupport enumeration in decreasing size."""
    m_mat = numerics.as_matrix(m_mat, "m_mat")
    y = numerics.as_vector(y, "y")
    n_rows, dim = op.n_rows, op.dim
    if m_mat.shape[1] != dim or m_mat.shape[0] != y.shape[0]:
        raise ContractViolation(f"oracle_analysis: M is {m_mat.shape}, y has length {y.shape[0]}, operator dim {dim}")
    if not 0 <= l_min <= n_rows:
        raise ContractViolation(f"l_min must lie in [0, {n_rows}], got {l_min}")
    _guard(n_rows, range(l_min, n_rows + 1), max_combinations)
    omega = op.omega
    y_tol = feasibility_tol * max(1.0, float(np.linalg.norm(y)))

    tried = 0
    for l in range(n_rows, l_min - 1, -1):
        feasible: List[Tuple[Tuple[int, ...], FloatArray, int]] = []
        rhs = np.concatenate([np.zeros(l), y])
        for lam in combinations(range(n_rows), l):
            tried += 1
            stacked = np.vstack([omega[list(lam)], m_mat])
            x, rank = numerics.least_squares(stacked, rhs, full_output=True)
            x_tol = feasibility_tol * max(1.0, float(np.linalg.norm(x)))
            if (float(np.linalg.norm(omega[list(lam)] @ x)) <= x_tol
                    and float(np.linalg.norm(m_mat @ x - y)) <= y_tol):
                feasible.append((lam, x, rank))
        if feasible:
            lam, x, rank = feasible[0]
            return SolveOutcome(
                coef=x, iterations=tried, residual_norm=float(np.linalg.norm(m_mat @ x - y)), converged=True,
                extras={"level": l, "unique": len(feasible) == 1 and rank == dim,
                        "feasible_count": len(feasible), "cosupport": lam},
            )
    log.debug("oracle_analysis: no feasible cosupport down to l = %d", l_min)
    return SolveOutcome(
        coef=np.zeros(dim), iterations=tried, residual_norm=float(np.linalg.norm(y)),
        converged=False, flag="no_feasible_cosupport",
        extras={"level": None, "unique": False, "feasible_count": 0, "cosupport": ()},
    )
