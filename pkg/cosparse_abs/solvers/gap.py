# cosparse_abs/solvers/gap.py
from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from .. import numerics
from ..errors import ContractViolation
from ..io_types import FloatArray
from ..model import AnalysisOperator
from .base import SolveOutcome

log = logging.getLogger("cosparse_abs.solvers.gap")


def gap(op: AnalysisOperator, m_mat, y, target_l: Optional[int] = None,
        stop_tol: float = 1e-9, max_iterations: Optional[int] = None) -> SolveOutcome:
    """
    Greedy Analysis Pursuit, one cosupport row removed per iteration.

    Starting from the full cosupport estimate, x = argmin ||Omega_L x||_2
    s.t. M x = y is solved, and the row of L with the largest |(Omega x)_j|
    is dropped. The constrained problem is solved in the nullspace of M:
    x = x0 + Z z with x0 = M^+ y and Z spanning null(M), which is the
    reduced form of the KKT system.

    Stops when |L| reaches target_l, when ||Omega_L x|| < stop_tol, or,
    with target_l unknown, when every remaining row satisfies
    |(Omega x)_j| <= stop_tol * ||Omega x||_inf.
    """
    m_mat = numerics.as_matrix(m_mat, "m_mat")
    y = numerics.as_vector(y, "y")
    n_rows, dim = op.n_rows, op.dim
    if m_mat.shape[1] != dim or m_mat.shape[0] != y.shape[0]:
        raise ContractViolation(f"gap: M is {m_mat.shape}, y has length {y.shape[0]}, operator dim {dim}")
    if target_l is not None and not 0 <= target_l <= n_rows:
        raise ContractViolation(f"target_l must lie in [0, {n_rows}], got {target_l}")
    omega = op.omega

    x0 = numerics.pseudo_inverse(m_mat) @ y
    z_basis = numerics.nullspace_basis(m_mat).T   # d x (d - rank M)
    free = z_basis.shape[1]

    def solve(mask: np.ndarray) -> Tuple[FloatArray, bool]:
        if free == 0:
            return x0, True
        om = omega[mask]
        z, rank = numerics.least_squares(om @ z_basis, -(om @ x0), full_output=True)
        return x0 + z_basis @ z, rank == free

    cosupport = np.ones(n_rows, dtype=bool)
    x, ok = solve(cosupport)
    sizes: List[int] = [n_rows]
    flag: Optional[str] = None if ok else "singular_kkt"
    converged = False
    limit = n_rows if max_iterations is None else max_iterations
    it = 0

    while ok:
        analysed = np.abs(omega @ x)
        on_cosupport = analysed[cosupport]
        if float(np.linalg.norm(on_cosupport)) < stop_tol * max(1.0, float(np.linalg.norm(x))):
            converged = True
            break
        if target_l is not None and sizes[-1] <= target_l:
            converged = True
            break
        if target_l is None and on_cosupport.size and on_cosupport.max() <= stop_tol * analysed.max():
            converged = True
            break
        if sizes[-1] == 0 or it >= limit:
            flag = "max_iterations"
            break
        j = int(np.argmax(np.where(cosupport, analysed, -1.0)))
        cosupport[j] = False
        it += 1
        x_new, ok = solve(cosupport)
        if not ok:
            flag = "singular_kkt"
            log.debug("gap: rank-deficient system with |L| = %d, keeping previous iterate", sizes[-1] - 1)
            cosupport[j] = True
            it -= 1
            break
        x = x_new
        sizes.append(sizes[-1] - 1)

    residual = float(np.linalg.norm(m_mat @ x - y))
    return SolveOutcome(
        coef=x,
        iterations=it,
        residual_norm=residual,
        converged=converged,
        flag=flag,
        residual_history=[],
        extras={"cosupport_sizes": sizes, "cosupport": tuple(int(i) for i in np.flatnonzero(cosupport))},
    )
