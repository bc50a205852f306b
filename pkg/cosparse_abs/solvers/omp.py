# cosparse_abs/solvers/omp.py
from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np
import scipy.linalg

from .. import numerics
from ..errors import ContractViolation
from .base import SolveOutcome, check_system

log = logging.getLogger("cosparse_abs.solvers.omp")

# reciprocal condition below which a new column counts as dependent on the support
INSERT_RCOND = 1e-12


def omp(a, y, k: Optional[int] = None, eps: Optional[float] = None,
        max_iterations: Optional[int] = None) -> SolveOutcome:
    """
    Orthogonal Matching Pursuit.

    Stops after k selections (OMP-k), once ||residual||_2 < eps (OMP-eps),
    or after max_iterations selections, whichever comes first. Columns are
    compared by normalized correlation; zero columns are never selected.

    The least-squares fit on the support comes from a thin QR factorization
    of a[:, support] that grows by one column per selection.
    """
    a = numerics.as_matrix(a, "a")
    y = numerics.as_vector(y, "y")
    check_system(a, y)
    if k is None and eps is None:
        raise ContractViolation("omp needs k or eps")
    if k is not None and k < 0:
        raise ContractViolation(f"k must be non-negative, got {k}")
    rows, cols = a.shape

    norms = np.linalg.norm(a, axis=0)
    usable = norms > 0
    safe_norms = np.where(usable, norms, 1.0)

    limit = min(rows, cols) if max_iterations is None else min(rows, cols, max_iterations)
    if k is not None:
        limit = min(limit, k)

    coef = np.zeros(cols)
    residual = y.copy()
    res_norm = float(np.linalg.norm(residual))
    history = [res_norm]
    support: List[int] = []
    q = r = None
    flag: Optional[str] = None

    while len(support) < limit:
        if eps is not None and res_norm < eps:
            break
        corr = np.where(usable, np.abs(a.T @ residual) / safe_norms, -1.0)
        j = int(np.argmax(corr))
        if corr[j] <= 0.0:
            # residual orthogonal to every column
            if res_norm > 0.0:
                flag = "exhausted"
            break
        if j in support:
            flag = "stagnation"
            log.debug("omp: column %d reselected after %d atoms", j, len(support))
            break
        try:
            if q is None:
                q, r = scipy.linalg.qr(a[:, [j]], mode="economic")
            else:
                q, r = scipy.linalg.qr_insert(q, r, a[:, j], len(support), which="col", rcond=INSERT_RCOND)
        except np.linalg.LinAlgError:
            # in the span of the support already; never eligible again
            log.debug("omp: column %d dependent on the %d selected atoms", j, len(support))
            usable[j] = False
            continue
        support.append(j)
        qty = q.T @ y
        z = scipy.linalg.solve_triangular(r, qty)
        residual = y - q @ qty
        res_norm = float(np.linalg.norm(residual))
        history.append(res_norm)
        coef = np.zeros(cols)
        coef[support] = z

    if eps is not None and res_norm < eps:
        converged = True
    elif k is not None:
        converged = flag is None and (len(support) == k or res_norm == 0.0)
    else:
        converged = False
    if not converged and flag is None:
        flag = "max_iterations"

    return SolveOutcome(
        coef=coef,
        iterations=len(support),
        residual_norm=res_norm,
        converged=converged,
        flag=flag,
        residual_history=history,
        extras={"support": tuple(sorted(support))},
    )
