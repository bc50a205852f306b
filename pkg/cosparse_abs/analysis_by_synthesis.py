# cosparse_abs/analysis_by_synthesis.py
"""
Analysis-by-synthesis recovery.

With D = pinv(Omega) and P_D a matrix whose rows span null(D), the
analysis problem

    min ||Omega x||_0  s.t.  y = M x

has the same solution as

    x = D argmin ||gamma||_0  s.t.  [y; 0] = [M D; P_D] gamma

so any synthesis solver can recover cosparse signals. The lower block
confines gamma to the column span of Omega.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from . import model, numerics
from .errors import ContractViolation, NumericsError
from .io_types import FloatArray
from .model import AnalysisOperator, Cosupport
from .solvers import SolveOutcome, SolverConfig, SolverKind, gap, oracle_analysis, solve_synthesis

log = logging.getLogger("cosparse_abs.abs")


@dataclass(frozen=True)
class AugmentedSystem:
    a_tilde: FloatArray   # (m + rows of subspace block) x N
    y_tilde: FloatArray
    m_rows: int           # split between measurement block and subspace block

    @property
    def measurement_block(self) -> FloatArray:
        return self.a_tilde[: self.m_rows]

    @property
    def subspace_block(self) -> FloatArray:
        return self.a_tilde[self.m_rows:]


@dataclass
class SolverReport:
    gamma_hat: FloatArray
    x_hat: FloatArray
    iterations: int
    residual_norm: float
    elapsed: float
    solver_name: str
    converged: bool = True
    flag: Optional[str] = None
    extras: Dict[str, Any] = field(default_factory=dict)


def _check_problem(op: AnalysisOperator, m_mat, y):
    m_mat = numerics.as_matrix(m_mat, "m_mat")
    y = numerics.as_vector(y, "y")
    if m_mat.shape[1] != op.dim:
        raise ContractViolation(f"M has {m_mat.shape[1]} columns, operator dimension is {op.dim}")
    if m_mat.shape[0] != y.shape[0]:
        raise ContractViolation(f"M has {m_mat.shape[0]} rows but y has length {y.shape[0]}")
    return m_mat, y


def build_augmented_system(op: AnalysisOperator, m_mat, y, subspace_block: str = "basis") -> AugmentedSystem:
    m_mat, y = _check_problem(op, m_mat, y)
    top = m_mat @ op.dict
    bottom = op.subspace_block(subspace_block)
    return AugmentedSystem(
        a_tilde=np.vstack([top, bottom]),
        y_tilde=np.concatenate([y, np.zeros(bottom.shape[0])]),
        m_rows=int(m_mat.shape[0]),
    )


def abs_recover(op: AnalysisOperator, m_mat, y, solver: SolverConfig) -> SolverReport:
    if not solver.kind.is_synthesis:
        raise ContractViolation(f"{solver.name} is not a synthesis solver")
    start = time.perf_counter()
    system = build_augmented_system(op, m_mat, y, solver.subspace_block)
    try:
        outcome = solve_synthesis(solver, system.a_tilde, system.y_tilde)
    except NumericsError as e:
        log.debug("%s: %s", solver.name, e)
        outcome = SolveOutcome(
            coef=np.zeros(op.n_rows), iterations=0,
            residual_norm=float(np.linalg.norm(system.y_tilde)), converged=False, flag="numerics_error",
        )
    gamma = outcome.coef
    x_hat = op.dict @ gamma
    elapsed = time.perf_counter() - start
    return SolverReport(
        gamma_hat=gamma,
        x_hat=x_hat,
        iterations=outcome.iterations,
        residual_norm=float(np.linalg.norm(system.y_tilde - system.a_tilde @ gamma)),
        elapsed=elapsed,
        solver_name=solver.name,
        converged=outcome.converged,
        flag=outcome.flag,
        extras=outcome.extras,
    )


def cosupport_of(op: AnalysisOperator, x, tol: Optional[float] = None) -> Cosupport:
    """Rows j with |(Omega x)_j| <= tol * ||x||_2."""
    x = numerics.as_vector(x, "x")
    if x.shape[0] != op.dim:
        raise ContractViolation(f"x has length {x.shape[0]}, operator dimension is {op.dim}")
    tol = model.COSUPPORT_TOL if tol is None else tol
    if not tol > 0:
        raise ContractViolation("tol must be positive")
    analysed = np.abs(op.omega @ x)
    idx = np.flatnonzero(analysed <= tol * float(np.linalg.norm(x)))
    return Cosupport.from_indices(idx.tolist(), op.n_rows)


def recover(solver: SolverConfig, op: AnalysisOperator, m_mat, y, l: Optional[int] = None) -> SolverReport:
    """
    Run any registered solver on an analysis problem. Synthesis solvers go
    through abs_recover; OMP-k and TST take k = N - l when no k is set, GAP
    takes target_l = l.
    """
    kind = solver.kind
    if kind in (SolverKind.OMP_K, SolverKind.TST) and solver.k is None:
        if l is None:
            raise ContractViolation(f"{solver.name} needs k or the instance cosparsity l")
        solver = solver.with_k(max(1, op.n_rows - l) if kind is SolverKind.TST else op.n_rows - l)
    if kind.is_synthesis:
        return abs_recover(op, m_mat, y, solver)

    m_mat, y = _check_problem(op, m_mat, y)
    start = time.perf_counter()
    try:
        if kind is SolverKind.GAP:
            outcome = gap(op, m_mat, y, target_l=l, stop_tol=solver.gap_stop_tol,
                          max_iterations=solver.max_iterations)
        else:
            outcome = oracle_analysis(op, m_mat, y, feasibility_tol=solver.feasibility_tol,
                                      max_combinations=solver.max_combinations)
    except NumericsError as e:
        log.debug("%s: %s", solver.name, e)
        outcome = SolveOutcome(coef=np.zeros(op.dim), iterations=0, residual_norm=float(np.linalg.norm(y)),
                               converged=False, flag="numerics_error")
    elapsed = time.perf_counter() - start
    x_hat = outcome.coef
    return SolverReport(
        gamma_hat=op.omega @ x_hat,
        x_hat=x_hat,
        iterations=outcome.iterations,
        residual_norm=outcome.residual_norm,
        elapsed=elapsed,
        solver_name=solver.name,
        converged=outcome.converged,
        flag=outcome.flag,
        extras=outcome.extras,
    )
