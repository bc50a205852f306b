# cosparse_abs/numerics.py
"""
Dense linear-algebra contracts shared by the model, the reduction and the
solvers: SVD with a numerical-rank decision, Moore-Penrose pseudo-inverse,
orthonormal nullspace basis and minimum-norm least squares.

Matrices and vectors are plain float64 numpy arrays; every entry point
rejects non-finite input with ContractViolation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg

from .errors import ContractViolation, NumericsError
from .io_types import FloatArray

log = logging.getLogger("cosparse_abs.numerics")

# Relative rank tolerance; None means max(rows, cols) * machine epsilon.
RANK_RTOL: Optional[float] = None

EPS = float(np.finfo(np.float64).eps)


# ---- Validation ----
def as_matrix(a, name: str = "matrix") -> FloatArray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries")
    return arr

def as_vector(v, name: str = "vector") -> FloatArray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ContractViolation(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries")
    return arr

def rank_rtol(shape: Tuple[int, ...]) -> float:
    if RANK_RTOL is not None:
        return float(RANK_RTOL)
    return max(shape) * EPS


# ---- SVD ----
@dataclass(frozen=True)
class SvdResult:
    u: FloatArray                 # rows x r, orthonormal columns
    singular_values: FloatArray   # r, nonincreasing
    v: FloatArray                 # cols x r, orthonormal columns
    numerical_rank: int

def _count_rank(s: FloatArray, shape: Tuple[int, int]) -> int:
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s > rank_rtol(shape) * s[0]))

def _svd(a: FloatArray, full_matrices: bool) -> Tuple[FloatArray, FloatArray, FloatArray]:
    try:
        return scipy.linalg.svd(a, full_matrices=full_matrices, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        log.debug("gesdd failed on %s, retrying with gesvd", a.shape)
    try:
        return scipy.linalg.svd(a, full_matrices=full_matrices, lapack_driver="gesvd")
    except np.linalg.LinAlgError as e:
        raise NumericsError(f"SVD did not converge for {a.shape[0]}x{a.shape[1]} matrix") from e

def svd(a) -> SvdResult:
    a = as_matrix(a, "a")
    if a.size == 0:
        raise ContractViolation("svd needs a nonempty matrix")
    u, s, vh = _svd(a, full_matrices=False)
    return SvdResult(u=u, singular_values=s, v=vh.T, numerical_rank=_count_rank(s, a.shape))


# ---- Derived operations ----
def pseudo_inverse(a) -> FloatArray:
    """Moore-Penrose inverse: invert singular values above the rank threshold, zero the rest."""
    a = as_matrix(a, "a")
    rows, cols = a.shape
    if a.size == 0:
        return np.zeros((cols, rows))
    res = svd(a)
    r = res.numerical_rank
    inv_s = 1.0 / res.singular_values[:r]
    return (res.v[:, :r] * inv_s) @ res.u[:, :r].T

def nullspace_basis(d_mat) -> FloatArray:
    """
    Orthonormal rows spanning the nullspace of d_mat (d x N), taken from the
    trailing right singular vectors. Full-rank input gives exactly N - d rows.
    """
    d_mat = as_matrix(d_mat, "d_mat")
    rows, cols = d_mat.shape
    if rows == 0:
        return np.eye(cols)
    if cols == 0:
        return np.zeros((0, 0))
    _, s, vh = _svd(d_mat, full_matrices=True)
    r = _count_rank(s, d_mat.shape)
    return np.ascontiguousarray(vh[r:, :])

def least_squares(a, b, full_output: bool = False) -> Union[FloatArray, Tuple[FloatArray, int]]:
    """Minimum-norm minimizer of ||a z - b||_2 (SVD based, gelsd)."""
    a = as_matrix(a, "a")
    b = as_vector(b, "b")
    rows, cols = a.shape
    if rows != b.shape[0]:
        raise ContractViolation(f"least_squares: a has {rows} rows but b has length {b.shape[0]}")
    if a.size == 0:
        z = np.zeros(cols)
        return (z, 0) if full_output else z
    try:
        z, _, rank, _ = scipy.linalg.lstsq(a, b, cond=rank_rtol(a.shape), lapack_driver="gelsd")
    except np.linalg.LinAlgError as e:
        raise NumericsError(f"least squares did not converge for {rows}x{cols} system") from e
    return (z, int(rank)) if full_output else z
