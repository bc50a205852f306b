# cosparse_abs/bench.py
"""
Phase-transition experiments over the (delta, rho) grid.

Every trial is a pure function of (GridSpec, cell index, trial index):
its seed is RngSeed(master_seed, (2, i_delta, i_rho, trial)), so results
do not depend on how trials are scheduled over the worker pool. Only the
timing fields vary between runs.
"""
from __future__ import annotations

import logging
import math
import multiprocessing
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .analysis_by_synthesis import recover
from .config import apply_config, section
from .errors import AbsError, ContractViolation
from .io_types import JSONDict
from .model import AnalysisOperator, RngSeed, derive_dimensions, generate_tight_frame, make_instance
from .solvers import SolverConfig

log = logging.getLogger("cosparse_abs.bench")

_OPERATOR_STREAM = 0
_CELL_OPERATOR_STREAM = 1
_TRIAL_STREAM = 2


# ---- Types ----
@dataclass(frozen=True)
class GridSpec:
    d: int = 200
    n_rows: int = 240
    delta_values: Tuple[float, ...] = ()
    rho_values: Tuple[float, ...] = ()
    trials_per_cell: int = 100
    solvers: Tuple[SolverConfig, ...] = ()
    success_tol: float = 1e-6
    master_seed: int = 0
    regenerate_operator: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta_values", tuple(float(v) for v in self.delta_values))
        object.__setattr__(self, "rho_values", tuple(float(v) for v in self.rho_values))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if not self.n_rows >= self.d >= 1:
            raise ContractViolation(f"need n_rows >= d >= 1, got N={self.n_rows}, d={self.d}")
        if self.trials_per_cell < 0:
            raise ContractViolation("trials_per_cell must be non-negative")
        if not self.success_tol > 0:
            raise ContractViolation("success_tol must be positive")
        names = [s.name for s in self.solvers]
        if len(set(names)) != len(names):
            raise ContractViolation(f"duplicate solvers in grid: {names}")
        for delta in self.delta_values:
            for rho in self.rho_values:
                derive_dimensions(self.d, delta, rho)   # raises on an invalid cell
        RngSeed(self.master_seed)

    @property
    def cell_count(self) -> int:
        return len(self.delta_values) * len(self.rho_values)

    @property
    def instance_count(self) -> int:
        return self.cell_count * self.trials_per_cell

    def cell_index(self, delta: float, rho: float) -> Tuple[int, int]:
        try:
            return self.delta_values.index(float(delta)), self.rho_values.index(float(rho))
        except ValueError:
            raise ContractViolation(f"({delta}, {rho}) is not a cell of this grid") from None

    def operator_seed(self, i_delta: Optional[int] = None, i_rho: Optional[int] = None) -> RngSeed:
        root = RngSeed(self.master_seed)
        if self.regenerate_operator and i_delta is not None and i_rho is not None:
            return root.child(_CELL_OPERATOR_STREAM, i_delta, i_rho)
        return root.child(_OPERATOR_STREAM)

    def trial_seed(self, i_delta: int, i_rho: int, trial: int) -> RngSeed:
        return RngSeed(self.master_seed).child(_TRIAL_STREAM, i_delta, i_rho, trial)

    @classmethod
    def from_config(cls, cfg: JSONDict, **overrides: Any) -> "GridSpec":
        bench = dict(section(cfg, "bench", {}) or {})
        bench.update({k: v for k, v in overrides.items() if v is not None})
        solver_tokens = bench.get("solvers") or []
        return cls(
            d=int(bench["d"]),
            n_rows=int(bench["n_rows"]),
            delta_values=tuple(bench["delta_values"]),
            rho_values=tuple(bench["rho_values"]),
            trials_per_cell=int(bench["trials_per_cell"]),
            solvers=tuple(SolverConfig.from_config(t, cfg) for t in solver_tokens),
            success_tol=float(bench["success_tol"]),
            master_seed=int(bench["master_seed"]),
            regenerate_operator=bool(bench.get("regenerate_operator", False)),
        )


@dataclass(frozen=True)
class TrialOutcome:
    solver: str
    relative_error: float
    elapsed: float
    success: bool
    flag: Optional[str] = None


@dataclass(frozen=True)
class CellResult:
    seed: RngSeed
    delta: float
    rho: float
    i_delta: int
    i_rho: int
    trial: int
    outcomes: Tuple[TrialOutcome, ...]

    @property
    def key(self) -> Tuple[int, int, int]:
        return self.i_delta, self.i_rho, self.trial


@dataclass
class CellStats:
    successes: int = 0
    trials: int = 0
    total_time: float = 0.0
    mean_relative_error: float = 0.0

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


@dataclass
class PhaseGrid:
    solvers: List[str] = field(default_factory=list)
    delta_values: List[float] = field(default_factory=list)
    rho_values: List[float] = field(default_factory=list)
    cells: Dict[Tuple[str, float, float], CellStats] = field(default_factory=dict)

    def stats(self, solver: str, delta: float, rho: float) -> CellStats:
        return self.cells[(solver, float(delta), float(rho))]

    def success_rate(self, solver: str, delta: float, rho: float) -> float:
        return self.stats(solver, delta, rho).success_rate

    def total_time(self, solver: str) -> float:
        return math.fsum(s.total_time for (name, _, _), s in sorted(self.cells.items()) if name == solver)

    def mean_success_rate(self, solver: str) -> float:
        rates = [s.success_rate for (name, _, _), s in self.cells.items() if name == solver]
        return sum(rates) / len(rates) if rates else 0.0

    def is_empty(self) -> bool:
        return not self.cells


# ---- Trials ----
def relative_error(x_hat, x) -> float:
    nrm = float(np.linalg.norm(x))
    err = float(np.linalg.norm(np.asarray(x_hat) - x))
    return err / nrm if nrm > 0 else err

def run_trial(spec: GridSpec, op: AnalysisOperator, i_delta: int, i_rho: int, trial: int) -> CellResult:
    delta, rho = spec.delta_values[i_delta], spec.rho_values[i_rho]
    seed = spec.trial_seed(i_delta, i_rho, trial)
    try:
        inst = make_instance(op, delta, rho, seed)
    except AbsError as e:
        log.warning("cell (%.3g, %.3g) trial %d: generation failed: %s", delta, rho, trial, e)
        failed = tuple(TrialOutcome(s.name, math.inf, 0.0, False, "generation_error") for s in spec.solvers)
        return CellResult(seed, delta, rho, i_delta, i_rho, trial, failed)

    outcomes: List[TrialOutcome] = []
    for solver in spec.solvers:
        try:
            report = recover(solver, op, inst.m_mat, inst.y, l=inst.l)
        except AbsError as e:
            log.debug("%s failed on cell (%.3g, %.3g) trial %d: %s", solver.name, delta, rho, trial, e)
            outcomes.append(TrialOutcome(solver.name, math.inf, 0.0, False, type(e).__name__))
            continue
        err = relative_error(report.x_hat, inst.x)
        if not math.isfinite(err):
            err = math.inf
        outcomes.append(TrialOutcome(solver.name, err, report.elapsed, err < spec.success_tol, report.flag))
    return CellResult(seed, delta, rho, i_delta, i_rho, trial, tuple(outcomes))

def run_cell(spec: GridSpec, op: AnalysisOperator, delta: float, rho: float) -> List[CellResult]:
    i_delta, i_rho = spec.cell_index(delta, rho)
    return [run_trial(spec, op, i_delta, i_rho, t) for t in range(spec.trials_per_cell)]


# ---- Aggregation ----
def aggregate(spec: GridSpec, results: Iterable[CellResult]) -> PhaseGrid:
    """Fold trial records into a PhaseGrid; records are sorted first so the result is order independent."""
    names = [s.name for s in spec.solvers]
    grid = PhaseGrid(solvers=names, delta_values=list(spec.delta_values), rho_values=list(spec.rho_values))
    errors: Dict[Tuple[str, float, float], List[float]] = {}
    times: Dict[Tuple[str, float, float], List[float]] = {}
    for delta in spec.delta_values:
        for rho in spec.rho_values:
            for name in names:
                grid.cells[(name, delta, rho)] = CellStats()
                errors[(name, delta, rho)] = []
                times[(name, delta, rho)] = []
    for rec in sorted(results, key=lambda r: r.key):
        for out in rec.outcomes:
            key = (out.solver, rec.delta, rec.rho)
            stats = grid.cells[key]
            stats.trials += 1
            stats.successes += int(out.success)
            errors[key].append(out.relative_error)
            times[key].append(out.elapsed)
    for key, stats in grid.cells.items():
        stats.total_time = math.fsum(times[key])
        finite = [e for e in errors[key] if math.isfinite(e)]
        if finite:
            stats.mean_relative_error = math.fsum(finite) / len(finite)
        elif errors[key]:
            stats.mean_relative_error = math.inf
    return grid


# ---- Worker pool ----
_WORKER: Dict[str, Any] = {}

def _init_worker(cfg: Optional[JSONDict], spec: GridSpec, op: Optional[AnalysisOperator]) -> None:
    if cfg is not None:
        apply_config(cfg)
    _WORKER["spec"] = spec
    _WORKER["op"] = op
    _WORKER["cell_ops"] = {}

def _operator_for(i_delta: int, i_rho: int) -> AnalysisOperator:
    spec: GridSpec = _WORKER["spec"]
    if not spec.regenerate_operator:
        return _WORKER["op"]
    cache = _WORKER["cell_ops"]
    if (i_delta, i_rho) not in cache:
        cache.clear()
        cache[(i_delta, i_rho)] = generate_tight_frame(spec.n_rows, spec.d, spec.operator_seed(i_delta, i_rho))
    return cache[(i_delta, i_rho)]

def _run_task(task: Tuple[int, int, int]) -> CellResult:
    i_delta, i_rho, trial = task
    return run_trial(_WORKER["spec"], _operator_for(i_delta, i_rho), i_delta, i_rho, trial)

def _tasks(spec: GridSpec) -> List[Tuple[int, int, int]]:
    return [
        (i, j, t)
        for i in range(len(spec.delta_values))
        for j in range(len(spec.rho_values))
        for t in range(spec.trials_per_cell)
    ]

def run_grid(spec: GridSpec, jobs: int = 1, cfg: Optional[JSONDict] = None) -> PhaseGrid:
    op = None if spec.regenerate_operator else generate_tight_frame(spec.n_rows, spec.d, spec.operator_seed())
    tasks = _tasks(spec)
    log.info(
        "phase grid: d=%d N=%d, %d cells x %d trials = %d instances, solvers %s, jobs %d",
        spec.d, spec.n_rows, spec.cell_count, spec.trials_per_cell, len(tasks),
        ",".join(s.name for s in spec.solvers), jobs,
    )
    results: List[CellResult] = []
    per_cell = max(1, spec.trials_per_cell)
    done_cells = 0

    def collect(stream: Iterable[CellResult]) -> None:
        nonlocal done_cells
        counts: Dict[Tuple[int, int], int] = {}
        for rec in stream:
            results.append(rec)
            cell = (rec.i_delta, rec.i_rho)
            counts[cell] = counts.get(cell, 0) + 1
            if counts[cell] == per_cell:
                done_cells += 1
                log.info("cell %d/%d done (delta=%.3g, rho=%.3g)", done_cells, spec.cell_count, rec.delta, rec.rho)

    if jobs <= 1 or len(tasks) <= 1:
        _init_worker(None, spec, op)
        collect(_run_task(t) for t in tasks)
    else:
        chunk = max(1, min(per_cell, len(tasks) // (jobs * 4) or 1))
        with multiprocessing.Pool(processes=jobs, initializer=_init_worker, initargs=(cfg, spec, op)) as pool:
            collect(pool.imap_unordered(_run_task, tasks, chunksize=chunk))
    return aggregate(spec, results)
