# cosparse_abs/solvers/bp.py
"""
Basis pursuit, min ||gamma||_1 s.t. a gamma = y, by the primal-dual
log-barrier interior-point method of l1-magic (l1eq_pd) on the linear
program in (gamma, u) with -u <= gamma <= u.

Before the interior-point loop the constraints are replaced by an
equivalent set with orthonormal rows (from the SVD of `a`), which drops
dependent rows and keeps the Newton systems well conditioned.

The interior-point loop stalls near the optimum once the Newton matrix
loses rank (reciprocal condition below `newton_tol`). The last iterate is
then polished: a support is read off it, least squares on that support
gives a feasible point, and the dual iterate projected onto that support
certifies the duality gap of the polished point.
"""
from __future__ import annotations

import logging
import warnings
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.linalg import norm

from .. import numerics
from ..errors import InfeasibleError
from .base import SolveOutcome, check_system

log = logging.getLogger("cosparse_abs.solvers.bp")

ALPHA = 0.01   # sufficient decrease for the backtracking line search
BETA = 0.5     # backtracking factor
MU = 10.0      # barrier growth per Newton step

# relative cut-offs, against max |gamma|, tried when reading a support off the last iterate
SUPPORT_THRESHOLDS = (1e-9, 1e-7, 1e-5, 1e-3)


def _reduce_rows(a, y, feasibility_tol: float):
    res = numerics.svd(a)
    r = res.numerical_rank
    u_r, s_r, v_r = res.u[:, :r], res.singular_values[:r], res.v[:, :r]
    coords = u_r.T @ y
    outside = float(norm(y - u_r @ coords))
    if outside > feasibility_tol * max(1.0, float(norm(y))):
        raise InfeasibleError(f"y lies {outside:.3e} outside the column span of the system matrix")
    return v_r.T, coords / s_r


def _reciprocal_condition(h) -> float:
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(h, 1))
    return 0.0 if not np.isfinite(cond) or cond == 0.0 else 1.0 / cond


def _newton_solve(h, rhs, positive: bool):
    """Cholesky (or symmetric) solve, least squares once h is numerically singular."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            return scipy.linalg.solve(h, rhs, assume_a="pos" if positive else "sym")
        except (np.linalg.LinAlgError, ValueError):
            pass
        try:
            return scipy.linalg.lstsq(h, rhs, lapack_driver="gelsd")[0]
        except (np.linalg.LinAlgError, ValueError):
            return None


def _certified_gap(A, b, coef, w) -> float:
    """Duality gap of a feasible coef against the dual point w scaled into ||A^T w||_inf <= 1."""
    w = w / max(1.0, float(np.abs(A.T @ w).max()))
    return max(0.0, float(np.abs(coef).sum()) - float(b @ w))


def _polish(A, b, x, w0, feasibility_tol: float):
    """
    Best (coef, gap) over the supports read off x, or None. Each candidate is
    the least-squares fit on its support; its dual point is w0 moved onto
    {w : A_S^T w = sign(coef_S)}.
    """
    n = A.shape[1]
    scale = float(np.abs(x).max())
    if scale == 0.0:
        return None
    best = None
    seen = set()
    for thr in SUPPORT_THRESHOLDS:
        s = np.flatnonzero(np.abs(x) > thr * scale)
        key = tuple(s.tolist())
        if key in seen or s.size > A.shape[0]:
            continue
        seen.add(key)
        a_s = A[:, s]
        z, rank = numerics.least_squares(a_s, b, full_output=True)
        if rank < s.size or np.any(z == 0.0):
            continue
        if norm(a_s @ z - b) > feasibility_tol * max(1.0, float(norm(b))):
            continue
        signs = np.sign(z)
        w = w0 + numerics.least_squares(a_s.T, signs - a_s.T @ w0)
        coef = np.zeros(n)
        coef[s] = z
        gap = _certified_gap(A, b, coef, w)
        if best is None or gap < best[1]:
            best = (coef, gap)
    return best


def basis_pursuit(a, y, duality_gap: float = 1e-10, newton_tol: float = 1e-14, max_newton: int = 100,
                  max_backtrack: int = 32, feasibility_tol: float = 1e-8) -> SolveOutcome:
    a = numerics.as_matrix(a, "a")
    y = numerics.as_vector(y, "y")
    check_system(a, y)
    n = a.shape[1]
    if float(norm(y)) == 0.0 or a.size == 0:
        return SolveOutcome(coef=np.zeros(n), iterations=0, residual_norm=float(norm(y)), converged=True,
                            extras={"duality_gap": 0.0})

    A, b = _reduce_rows(a, y, feasibility_tol)
    AT = A.T
    e = np.ones(n)
    gradf0 = np.hstack([np.zeros(n), e])

    # A has orthonormal rows, so A^T b is the minimum-norm feasible start
    x = AT @ b
    absx = np.abs(x)
    u = 0.95 * absx + 0.1 * absx.max()

    fu1 = x - u
    fu2 = -x - u
    lamu1 = -1.0 / fu1
    lamu2 = -1.0 / fu2
    v = A @ (lamu2 - lamu1)
    ATv = AT @ v
    sdg = -(fu1 @ lamu1 + fu2 @ lamu2)
    tau = MU * 2 * n / sdg

    rcent = np.hstack([-lamu1 * fu1, -lamu2 * fu2]) - 1.0 / tau
    rdual = gradf0 + np.hstack([lamu1 - lamu2 + ATv, -lamu1 - lamu2])
    rpri = A @ x - b
    resnorm = np.sqrt(norm(rdual) ** 2 + norm(rcent) ** 2 + norm(rpri) ** 2)

    def rel_gap(gap: float, xx) -> float:
        return gap / max(1.0, float(np.abs(xx).sum()))

    history = [float(norm(a @ x - y))]
    flag: Optional[str] = "max_iterations"
    converged = False
    it = 0
    while it < max_newton:
        if rel_gap(sdg, x) < duality_gap:
            converged, flag = True, None
            break
        it += 1
        ootau = 1.0 / tau
        oofu1 = 1.0 / fu1
        oofu2 = 1.0 / fu2
        w1 = -ootau * (oofu2 - oofu1) - ATv
        w2 = -1.0 - ootau * (oofu1 + oofu2)
        w3 = -rpri

        lamu1xoofu1 = lamu1 * oofu1
        lamu2xoofu2 = lamu2 * oofu2
        sig1 = -lamu1xoofu1 - lamu2xoofu2
        sig2 = lamu1xoofu1 - lamu2xoofu2
        sigx = sig1 - sig2 ** 2 / sig1
        if np.min(np.abs(sigx)) == 0.0:
            flag = "ill_conditioned"
            break

        w1p = -(w3 - A @ (w1 / sigx - w2 * sig2 / (sigx * sig1)))
        H11p = (A / sigx) @ AT
        hcond = _reciprocal_condition(H11p)
        dv = None if hcond < newton_tol else _newton_solve(H11p, w1p, positive=bool(np.min(sigx) > 0))
        if dv is None:
            flag = "ill_conditioned"
            log.debug("bp: Newton matrix rcond %.2e at step %d, keeping previous iterate", hcond, it)
            break

        dx = (w1 - w2 * sig2 / sig1 - AT @ dv) / sigx
        Adx = A @ dx
        ATdv = AT @ dv
        du = (w2 - sig2 * dx) / sig1
        dlamu1 = lamu1xoofu1 * (du - dx) - lamu1 - ootau * oofu1
        dlamu2 = lamu2xoofu2 * (dx + du) - lamu2 - ootau * oofu2

        # largest step keeping the iterate strictly interior
        s = 1.0
        neg1 = dlamu1 < 0
        neg2 = dlamu2 < 0
        if np.any(neg1):
            s = min(s, float(np.min(-lamu1[neg1] / dlamu1[neg1])))
        if np.any(neg2):
            s = min(s, float(np.min(-lamu2[neg2] / dlamu2[neg2])))
        pos1 = (dx - du) > 0
        pos2 = (-dx - du) > 0
        if np.any(pos1):
            s = min(s, float(np.min(-fu1[pos1] / (dx[pos1] - du[pos1]))))
        if np.any(pos2):
            s = min(s, float(np.min(-fu2[pos2] / (-dx[pos2] - du[pos2]))))
        s *= 0.99

        accepted = False
        for _ in range(max_backtrack):
            xp = x + s * dx
            up = u + s * du
            vp = v + s * dv
            ATvp = ATv + s * ATdv
            lamu1p = lamu1 + s * dlamu1
            lamu2p = lamu2 + s * dlamu2
            fu1p = xp - up
            fu2p = -xp - up
            rdp = gradf0 + np.hstack([lamu1p - lamu2p + ATvp, -lamu1p - lamu2p])
            rcp = np.hstack([-lamu1p * fu1p, -lamu2p * fu2p]) - ootau
            rpp = rpri + s * Adx
            if np.sqrt(norm(rdp) ** 2 + norm(rcp) ** 2 + norm(rpp) ** 2) <= (1 - ALPHA * s) * resnorm:
                accepted = True
                break
            s *= BETA
        if not accepted:
            flag = "line_search"
            log.debug("bp: line search failed at step %d", it)
            break

        x, u, v, ATv = xp, up, vp, ATvp
        lamu1, lamu2, fu1, fu2 = lamu1p, lamu2p, fu1p, fu2p
        sdg = -(fu1 @ lamu1 + fu2 @ lamu2)
        tau = MU * 2 * n / sdg
        rpri = rpp
        rcent = np.hstack([-lamu1 * fu1, -lamu2 * fu2]) - 1.0 / tau
        rdual = gradf0 + np.hstack([lamu1 - lamu2 + ATv, -lamu1 - lamu2])
        resnorm = np.sqrt(norm(rdual) ** 2 + norm(rcent) ** 2 + norm(rpri) ** 2)
        history.append(float(norm(a @ x - y)))

    gap_now = float(sdg)
    polished = False
    if rel_gap(gap_now, x) >= duality_gap:
        best = _polish(A, b, x, -v, feasibility_tol)
        if best is not None and best[1] < gap_now:
            x, gap_now, polished = best[0], best[1], True
            history.append(float(norm(a @ x - y)))
            log.debug("bp: polished on %d atoms, gap %.2e", int(np.count_nonzero(x)), gap_now)
    if rel_gap(gap_now, x) < duality_gap:
        converged, flag = True, None
    return SolveOutcome(
        coef=x,
        iterations=it,
        residual_norm=float(norm(a @ x - y)),
        converged=converged,
        flag=flag,
        residual_history=history,
        extras={"duality_gap": gap_now, "relative_gap": rel_gap(gap_now, x), "polished": polished},
    )
