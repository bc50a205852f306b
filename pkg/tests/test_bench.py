# tests/test_bench.py
from __future__ import annotations

import math

import numpy as np
import pytest

from cosparse_abs import bench
from cosparse_abs.bench import CellResult, GridSpec, TrialOutcome, aggregate, run_cell, run_grid
from cosparse_abs.config import GRID_DEFAULT
from cosparse_abs.errors import ContractViolation
from cosparse_abs.model import generate_tight_frame
from cosparse_abs.solvers import SolverConfig


def tiny_spec(**kw) -> GridSpec:
    base = dict(
        d=12, n_rows=14,
        delta_values=(0.5, 0.9), rho_values=(0.1, 0.9),
        trials_per_cell=3,
        solvers=(SolverConfig("omp-eps"), SolverConfig("bp"), SolverConfig("gap")),
        master_seed=42,
    )
    base.update(kw)
    return GridSpec(**base)


def test_grid_spec_validation():
    with pytest.raises(ContractViolation):
        tiny_spec(n_rows=10)
    with pytest.raises(ContractViolation):
        tiny_spec(delta_values=(0.0,))
    with pytest.raises(ContractViolation):
        tiny_spec(solvers=(SolverConfig("bp"), SolverConfig("basis pursuit")))
    spec = tiny_spec()
    assert spec.cell_count == 4
    assert spec.instance_count == 12
    assert spec.cell_index(0.9, 0.1) == (1, 0)


def test_grid_spec_from_config_with_overrides(default_cfg):
    spec = GridSpec.from_config(default_cfg, d=20, n_rows=24, trials_per_cell=2, solvers=["OMP_eps", "gap"])
    assert (spec.d, spec.n_rows, spec.trials_per_cell) == (20, 24, 2)
    assert [s.name for s in spec.solvers] == ["omp-eps", "gap"]
    assert spec.delta_values == tuple(GRID_DEFAULT)
    assert len(spec.rho_values) == 19


def test_seed_streams_do_not_depend_on_scheduling():
    spec = tiny_spec()
    assert spec.trial_seed(1, 0, 2) == spec.trial_seed(1, 0, 2)
    assert spec.trial_seed(1, 0, 2) != spec.trial_seed(0, 1, 2)
    assert spec.operator_seed(0, 0) == spec.operator_seed(1, 1)
    regen = tiny_spec(regenerate_operator=True)
    assert regen.operator_seed(0, 0) != regen.operator_seed(1, 1)


def test_run_cell_records_every_solver():
    spec = tiny_spec()
    op = generate_tight_frame(spec.n_rows, spec.d, spec.operator_seed())
    records = run_cell(spec, op, 0.9, 0.1)
    assert len(records) == spec.trials_per_cell
    for rec in records:
        assert [o.solver for o in rec.outcomes] == ["omp-eps", "bp", "gap"]
        assert all(o.elapsed >= 0.0 for o in rec.outcomes)
        assert all(o.success == (o.relative_error < spec.success_tol) for o in rec.outcomes)


def test_run_cell_with_zero_trials_is_empty():
    spec = tiny_spec(trials_per_cell=0)
    op = generate_tight_frame(spec.n_rows, spec.d, spec.operator_seed())
    assert run_cell(spec, op, 0.5, 0.1) == []


def test_fully_sampled_cell_is_trivially_easy():
    spec = tiny_spec(delta_values=(1.0,), rho_values=(0.1,), trials_per_cell=4,
                     solvers=(SolverConfig("omp-eps"), SolverConfig("bp")))
    grid = run_grid(spec)
    assert len(grid.cells) == 2
    assert grid.success_rate("bp", 1.0, 0.1) == 1.0
    assert grid.success_rate("omp-eps", 1.0, 0.1) == 1.0


def test_aggregate_is_order_independent():
    spec = tiny_spec(solvers=(SolverConfig("bp"),), delta_values=(0.5,), rho_values=(0.1,))
    seed = spec.trial_seed(0, 0, 0)
    recs = [
        CellResult(seed, 0.5, 0.1, 0, 0, t, (TrialOutcome("bp", err, 0.25, err < 1e-6),))
        for t, err in enumerate([1e-9, 0.5, math.inf])
    ]
    a = aggregate(spec, recs)
    b = aggregate(spec, list(reversed(recs)))
    assert a.cells == b.cells
    stats = a.stats("bp", 0.5, 0.1)
    assert (stats.successes, stats.trials) == (1, 3)
    assert stats.total_time == pytest.approx(0.75)
    assert stats.mean_relative_error == pytest.approx((1e-9 + 0.5) / 2)
    assert a.success_rate("bp", 0.5, 0.1) == pytest.approx(1 / 3)


def test_run_grid_covers_every_cell():
    spec = tiny_spec()
    grid = run_grid(spec)
    assert sorted(grid.solvers) == ["bp", "gap", "omp-eps"]
    assert len(grid.cells) == 3 * spec.cell_count
    for stats in grid.cells.values():
        assert stats.trials == spec.trials_per_cell
        assert 0.0 <= stats.success_rate <= 1.0


def test_tighter_success_tolerance_never_raises_success():
    grids = [run_grid(tiny_spec(success_tol=tol)) for tol in (1e-2, 1e-6, 1e-12)]
    for key in grids[0].cells:
        counts = [g.cells[key].successes for g in grids]
        assert counts == sorted(counts, reverse=True), key
        assert len({g.cells[key].mean_relative_error for g in grids}) == 1


def test_run_grid_is_deterministic_across_jobs():
    spec = tiny_spec()
    serial = run_grid(spec, jobs=1)
    parallel = run_grid(spec, jobs=2)
    for key, stats in serial.cells.items():
        other = parallel.cells[key]
        assert (stats.successes, stats.trials) == (other.successes, other.trials)
        assert stats.mean_relative_error == other.mean_relative_error


def test_regenerated_operators_change_results():
    fixed = run_grid(tiny_spec(solvers=(SolverConfig("gap"),)))
    regen = run_grid(tiny_spec(solvers=(SolverConfig("gap"),), regenerate_operator=True))
    assert set(fixed.cells) == set(regen.cells)
    assert any(fixed.cells[k].mean_relative_error != regen.cells[k].mean_relative_error for k in fixed.cells)


def test_generation_failure_marks_trials_failed(monkeypatch):
    from cosparse_abs.errors import GenerationError

    def boom(*args, **kwargs):
        raise GenerationError("no draws left")

    monkeypatch.setattr(bench, "make_instance", boom)
    spec = tiny_spec(delta_values=(0.5,), rho_values=(0.5,), trials_per_cell=2)
    grid = run_grid(spec)
    for stats in grid.cells.values():
        assert stats.successes == 0 and stats.trials == 2
        assert stats.mean_relative_error == math.inf


# ---- Desk-scale phase transition ----
@pytest.mark.slow
def test_desk_scale_phase_transition():
    import os

    spec = GridSpec(
        d=50, n_rows=60,
        delta_values=GRID_DEFAULT, rho_values=GRID_DEFAULT,
        trials_per_cell=20,
        solvers=tuple(SolverConfig(k) for k in ("omp-k", "omp-eps", "tst", "bp", "gap")),
        master_seed=0,
    )
    grid = run_grid(spec, jobs=os.cpu_count() or 1)

    for name in ("bp", "omp-eps"):
        assert grid.success_rate(name, 0.9, 0.1) >= 0.95
        assert grid.success_rate(name, 0.1, 0.9) <= 0.05
    assert grid.mean_success_rate("omp-eps") - grid.mean_success_rate("omp-k") >= 0.10

    bp_white = [(d, r) for d in GRID_DEFAULT for r in GRID_DEFAULT if grid.success_rate("bp", d, r) >= 0.95]
    overlap = sum(grid.success_rate("gap", d, r) >= 0.95 for d, r in bp_white)
    assert overlap >= 0.9 * len(bp_white)

    assert grid.total_time("omp-eps") < grid.total_time("bp")
    assert grid.total_time("omp-k") < grid.total_time("bp")


@pytest.mark.slow
def test_full_scale_column_is_monotone_in_rho(tmp_path):
    import os

    from cosparse_abs.export import export_csv, export_success_map

    spec = GridSpec(
        d=200, n_rows=240, delta_values=(0.5,), rho_values=GRID_DEFAULT,
        trials_per_cell=100, solvers=(SolverConfig("bp"),), master_seed=0,
    )
    grid = run_grid(spec, jobs=os.cpu_count() or 1)
    export_csv(grid, str(tmp_path / "column.csv"))
    export_success_map(grid, "bp", str(tmp_path / "bp.pgm"))
    counts = np.array([grid.stats("bp", 0.5, r).successes for r in GRID_DEFAULT])
    assert np.all(np.diff(counts) <= 2)
