# cosparse_abs/solvers/__init__.py
from __future__ import annotations

from ..errors import ContractViolation
from .base import BpTolerances, SolveOutcome, SolverConfig, SolverKind, resolve_kind
from .bp import basis_pursuit
from .gap import gap
from .omp import omp
from .oracles import oracle_analysis, oracle_synthesis
from .tst import tst

__all__ = [
    "BpTolerances", "SolveOutcome", "SolverConfig", "SolverKind", "resolve_kind",
    "basis_pursuit", "gap", "omp", "oracle_analysis", "oracle_synthesis", "tst",
    "solve_synthesis",
]


def solve_synthesis(cfg: SolverConfig, a, y) -> SolveOutcome:
    """Run a synthesis-domain solver on a gamma = y."""
    kind = cfg.kind
    if kind is SolverKind.OMP_K:
        if cfg.k is None:
            raise ContractViolation("OMP-k needs k")
        return omp(a, y, k=cfg.k, max_iterations=cfg.max_iterations)
    if kind is SolverKind.OMP_EPS:
        return omp(a, y, eps=cfg.eps_residual, max_iterations=cfg.max_iterations)
    if kind is SolverKind.TST:
        if cfg.k is None:
            raise ContractViolation("TST needs k")
        return tst(a, y, k=cfg.k, max_iterations=cfg.max_iterations, alpha=cfg.alpha,
                   beta=cfg.beta, kappa=cfg.kappa, tol=cfg.eps_residual)
    if kind is SolverKind.BP:
        return basis_pursuit(
            a, y,
            duality_gap=cfg.bp.duality_gap, newton_tol=cfg.bp.newton_tol,
            max_newton=cfg.bp.max_newton, max_backtrack=cfg.bp.max_backtrack,
            feasibility_tol=cfg.feasibility_tol,
        )
    if kind is SolverKind.ORACLE_SYNTHESIS:
        return oracle_synthesis(a, y, k_max=cfg.k, feasibility_tol=cfg.feasibility_tol,
                                max_combinations=cfg.max_combinations)
    raise ContractViolation(f"{kind.value} is not a synthesis solver")
