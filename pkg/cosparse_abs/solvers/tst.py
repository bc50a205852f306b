# cosparse_abs/solvers/tst.py
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from .. import numerics
from ..errors import ContractViolation
from .base import SolveOutcome, check_system, top_indices

log = logging.getLogger("cosparse_abs.solvers.tst")


def tst(a, y, k: int, max_iterations: Optional[int] = None, alpha: Optional[int] = None,
        beta: Optional[int] = None, kappa: float = 1.0, tol: float = 1e-9) -> SolveOutcome:
    """
    Two-stage thresholding. With alpha = beta = k and kappa = 1 this is
    subspace pursuit; larger alpha gives the CoSaMP-like members.

    Stage 1 keeps the alpha largest entries of the proxy
    gamma + kappa * a^T (y - a gamma), merges them with the current support
    and solves least squares on the union. Stage 2 keeps the beta largest
    coefficients of that solution and solves least squares again.
    The best-residual iterate seen is returned.
    """
    a = numerics.as_matrix(a, "a")
    y = numerics.as_vector(y, "y")
    check_system(a, y)
    rows, cols = a.shape
    if not 1 <= k <= cols:
        raise ContractViolation(f"tst needs 1 <= k <= {cols}, got {k}")
    alpha = k if alpha is None else int(alpha)
    beta = min(k, k if beta is None else int(beta))
    max_iterations = max(1, min(rows, cols)) if max_iterations is None else max_iterations

    norms = np.linalg.norm(a, axis=0)
    safe_norms = np.where(norms > 0, norms, 1.0)
    an = a / safe_norms

    y_norm = float(np.linalg.norm(y))
    best_coef = np.zeros(cols)
    best_res = y_norm
    history = [y_norm]
    if y_norm <= tol:
        return SolveOutcome(coef=best_coef, iterations=0, residual_norm=y_norm,
                            converged=True, residual_history=history)

    coef = np.zeros(cols)
    support = np.zeros(0, dtype=np.intp)
    prev_res = y_norm
    converged = False
    flag: Optional[str] = "max_iterations"
    iterations = 0

    for it in range(1, max_iterations + 1):
        iterations = it
        proxy = coef + kappa * (an.T @ (y - an @ coef))
        widened = np.union1d(top_indices(np.abs(proxy), alpha), support).astype(np.intp)
        z = numerics.least_squares(an[:, widened], y)
        keep = np.sort(widened[top_indices(np.abs(z), beta)])
        z2 = numerics.least_squares(an[:, keep], y)
        new_coef = np.zeros(cols)
        new_coef[keep] = z2
        res = float(np.linalg.norm(y - an[:, keep] @ z2))
        history.append(res)

        if res < best_res:
            best_res, best_coef = res, new_coef
        stable = np.array_equal(keep, support)
        coef, support = new_coef, keep

        if res <= tol:
            converged, flag = True, None
            break
        if stable:
            flag = "stable_support"
            break
        if res >= prev_res:
            flag = "no_improvement"
            break
        prev_res = res

    if flag:
        log.debug("tst: stopped after %d iterations (%s), residual %.3e", iterations, flag, best_res)
    return SolveOutcome(
        coef=best_coef / safe_norms,
        iterations=iterations,
        residual_norm=best_res,
        converged=converged,
        flag=flag,
        residual_history=history,
        extras={"support": tuple(int(i) for i in np.flatnonzero(best_coef))},
    )
