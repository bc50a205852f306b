# cosparse_abs/model.py
"""
Problem-domain types and random instance generation: tight-frame analysis
operators, cosparse signals and Gaussian measurement matrices.

All randomness flows from RngSeed, a (seed, path) pair feeding numpy's
SeedSequence into a PCG64 generator, so an instance is a pure function of
its parameters and seed.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from . import numerics
from .errors import ContractViolation, GenerationError
from .io_types import FloatArray
from .utils.io_helpers import retry

log = logging.getLogger("cosparse_abs.model")

# |(Omega x)_j| at or below this (relative to ||x||) counts as a zero
COSUPPORT_TOL = 1e-8
MAX_REDRAWS = 50

_U64 = 2 ** 64


# ---- Seeds ----
@dataclass(frozen=True)
class RngSeed:
    seed: int
    path: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < _U64:
            raise ContractViolation(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if any(int(k) < 0 for k in self.path):
            raise ContractViolation(f"seed path entries must be non-negative, got {self.path}")

    def child(self, *keys: int) -> "RngSeed":
        return RngSeed(self.seed, self.path + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))


# ---- Types ----
@dataclass(frozen=True)
class AnalysisOperator:
    omega: FloatArray       # N x d, full column rank
    dict: FloatArray        # d x N, pseudo-inverse of omega
    null_basis: FloatArray  # (N - d) x N, orthonormal rows, null(dict)

    @classmethod
    def from_omega(cls, omega) -> "AnalysisOperator":
        omega = numerics.as_matrix(omega, "omega")
        n_rows, dim = omega.shape
        if dim < 1 or n_rows < dim:
            raise ContractViolation(f"analysis operator must be N x d with N >= d >= 1, got {omega.shape}")
        rank = numerics.svd(omega).numerical_rank
        if rank != dim:
            raise ContractViolation(f"analysis operator has rank {rank}, needs full column rank {dim}")
        d_mat = numerics.pseudo_inverse(omega)
        return cls(omega=omega, dict=d_mat, null_basis=numerics.nullspace_basis(d_mat))

    @property
    def n_rows(self) -> int:
        return int(self.omega.shape[0])

    @property
    def dim(self) -> int:
        return int(self.omega.shape[1])

    def subspace_block(self, kind: str = "basis") -> FloatArray:
        """Rows whose nullspace is the column span of omega."""
        if kind == "basis":
            return self.null_basis
        if kind == "projector":
            return np.eye(self.n_rows) - self.omega @ self.dict
        raise ContractViolation(f"unknown subspace block kind {kind!r}")


@dataclass(frozen=True)
class Cosupport:
    indices: Tuple[int, ...]

    @classmethod
    def from_indices(cls, indices: Sequence[int], n_rows: int) -> "Cosupport":
        idx = sorted(int(i) for i in indices)
        if len(set(idx)) != len(idx):
            raise ContractViolation("cosupport indices must be distinct")
        if idx and (idx[0] < 0 or idx[-1] >= n_rows):
            raise ContractViolation(f"cosupport indices must lie in [0, {n_rows})")
        return cls(indices=tuple(idx))

    @property
    def l(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)


@dataclass(frozen=True)
class CosparseInstance:
    x: FloatArray
    cosupport: Cosupport
    m_mat: FloatArray
    y: FloatArray
    delta: float
    rho: float
    seed: Optional[RngSeed] = field(default=None, compare=False)

    @property
    def m(self) -> int:
        return int(self.m_mat.shape[0])

    @property
    def l(self) -> int:
        return self.cosupport.l


# ---- Generators ----
def round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))

def derive_dimensions(dim: int, delta: float, rho: float) -> Tuple[int, int]:
    """(m, l) from delta = m/d and rho = (d - l)/m; at least one nonzero of Omega x is kept."""
    if not (0 < delta <= 1 and 0 < rho <= 1):
        raise ContractViolation(f"delta and rho must lie in (0, 1], got ({delta}, {rho})")
    m = max(1, round_half_up(delta * dim))
    l = dim - max(1, round_half_up(rho * m))
    if not 0 <= l <= dim:
        raise ContractViolation(f"derived cosparsity {l} outside [0, {dim}]")
    return m, l

def generate_tight_frame(n_rows: int, dim: int, seed: RngSeed) -> AnalysisOperator:
    """Omega = orthonormalized columns of an i.i.d. Gaussian N x d matrix."""
    if not n_rows >= dim >= 1:
        raise ContractViolation(f"need n_rows >= dim >= 1, got {n_rows} x {dim}")
    rng = seed.generator()

    def draw() -> AnalysisOperator:
        g = rng.standard_normal((n_rows, dim))
        q, r = scipy.linalg.qr(g, mode="economic")
        diag = np.abs(np.diag(r))
        if diag.min() <= dim * numerics.EPS * diag.max():
            raise GenerationError("degenerate Gaussian draw for tight frame")
        # sign fix makes the factorization unique
        q = q * np.sign(np.diag(r))
        return AnalysisOperator.from_omega(q)

    return retry(draw, attempts=MAX_REDRAWS, catch=(GenerationError, ContractViolation), ctx="tight frame")

def generate_cosparse_signal(op: AnalysisOperator, l: int, seed: RngSeed) -> Tuple[FloatArray, Cosupport]:
    """Unit-norm x with Omega_L x = 0 on a uniformly random cosupport L of size l."""
    n_rows, dim = op.n_rows, op.dim
    if not 0 <= l <= dim:
        raise ContractViolation(f"cosparsity must lie in [0, {dim}], got {l}")
    rng = seed.generator()

    def draw() -> Tuple[FloatArray, Cosupport]:
        lam = np.sort(rng.choice(n_rows, size=l, replace=False))
        basis = numerics.nullspace_basis(op.omega[lam])
        if basis.shape[0] == 0:
            raise GenerationError(f"cosupport of size {l} leaves a trivial nullspace")
        x = basis.T @ (basis @ rng.standard_normal(dim))
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            raise GenerationError("zero projection")
        x = x / nrm
        analysed = np.abs(op.omega @ x)
        if l and analysed[lam].max() > COSUPPORT_TOL:
            raise GenerationError("cosupport rows not annihilated")
        nonzeros = int(np.count_nonzero(analysed > COSUPPORT_TOL))
        if nonzeros != n_rows - l:
            raise GenerationError(f"signal has {nonzeros} nonzeros, expected {n_rows - l}")
        return x, Cosupport.from_indices(lam.tolist(), n_rows)

    return retry(draw, attempts=MAX_REDRAWS, catch=(GenerationError,), ctx="cosparse signal")

def generate_measurement_matrix(m: int, dim: int, seed: RngSeed) -> FloatArray:
    """i.i.d. N(0, 1) entries, each column scaled to unit l2 norm."""
    if not 1 <= m <= dim:
        raise ContractViolation(f"need 1 <= m <= dim, got m={m}, dim={dim}")
    rng = seed.generator()

    def draw() -> FloatArray:
        g = rng.standard_normal((m, dim))
        norms = np.linalg.norm(g, axis=0)
        if np.any(norms == 0.0):
            raise GenerationError("zero column in measurement matrix")
        return g / norms

    return retry(draw, attempts=MAX_REDRAWS, catch=(GenerationError,), ctx="measurement matrix")

def make_instance(op: AnalysisOperator, delta: float, rho: float, seed: RngSeed) -> CosparseInstance:
    m, l = derive_dimensions(op.dim, delta, rho)
    return instance_from_counts(op, m, l, seed, delta=delta, rho=rho)

def instance_from_counts(op: AnalysisOperator, m: int, l: int, seed: RngSeed,
                         delta: Optional[float] = None, rho: Optional[float] = None) -> CosparseInstance:
    """Instance with explicit measurement count m and cosparsity l."""
    if delta is None:
        delta = m / op.dim
    if rho is None:
        rho = (op.dim - l) / m if m else 0.0
    x, cosupport = generate_cosparse_signal(op, l, seed.child(0))
    m_mat = generate_measurement_matrix(m, op.dim, seed.child(1))
    log.debug("instance d=%d N=%d m=%d l=%d seed=%s", op.dim, op.n_rows, m, l, seed)
    return CosparseInstance(
        x=x, cosupport=cosupport, m_mat=m_mat, y=m_mat @ x,
        delta=float(delta), rho=float(rho), seed=seed,
    )
