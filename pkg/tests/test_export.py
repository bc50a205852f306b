# tests/test_export.py
from __future__ import annotations

import json
import math

import pytest
from openpyxl import load_workbook

from cosparse_abs.bench import CellStats, GridSpec, PhaseGrid
from cosparse_abs.errors import ContractViolation
from cosparse_abs.export import (
    CSV_HEADER,
    export_csv,
    export_success_map,
    export_workbook,
    manifest_path,
    read_csv,
    success_map_rows,
    timing_table,
    write_manifest,
)
from cosparse_abs.solvers import SolverConfig


@pytest.fixture
def grid() -> PhaseGrid:
    g = PhaseGrid(solvers=["omp-k", "bp"], delta_values=[0.1, 0.9], rho_values=[0.1, 0.9])
    rates = {(0.1, 0.1): 10, (0.9, 0.1): 20, (0.1, 0.9): 0, (0.9, 0.9): 5}
    for name, slow in (("omp-k", 0.5), ("bp", 4.0)):
        for (delta, rho), hits in rates.items():
            g.cells[(name, delta, rho)] = CellStats(
                successes=hits if name == "bp" else hits // 2, trials=20,
                total_time=slow * (1 + delta), mean_relative_error=0.1 * (20 - hits) + 1e-12,
            )
    return g


def test_csv_rows_are_sorted_and_round_trip(grid, tmp_path):
    path = tmp_path / "grid.csv"
    export_csv(grid, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + len(grid.cells)
    keys = [tuple(line.split(",")[:3]) for line in lines[1:]]
    assert keys == sorted(keys, key=lambda k: (k[0], float(k[1]), float(k[2])))
    assert lines[1].startswith("bp,0.1,0.1,10,20,0.5,")

    # no manifest next to the file: axes come back sorted
    back = read_csv(str(path))
    assert back.cells == grid.cells
    assert back.solvers == ["bp", "omp-k"]
    assert back.delta_values == [0.1, 0.9]


def test_csv_with_manifest_reproduces_the_grid(tmp_path):
    from cosparse_abs.bench import run_grid

    spec = GridSpec(d=12, n_rows=14, delta_values=(0.9, 0.5), rho_values=(0.3,), trials_per_cell=2,
                    solvers=(SolverConfig("omp-k"), SolverConfig("bp")), master_seed=5)
    grid = run_grid(spec)
    path = tmp_path / "run.csv"
    export_csv(grid, str(path))
    write_manifest(spec, manifest_path(str(path)), jobs=1)

    back = read_csv(str(path))
    assert back.solvers == ["omp-k", "bp"]
    assert back.delta_values == [0.9, 0.5]
    assert back == grid
    assert timing_table(back) == timing_table(grid)


def test_manifest_listing_other_solvers_is_ignored(grid, tmp_path):
    path = tmp_path / "grid.csv"
    export_csv(grid, str(path))
    (tmp_path / "grid.csv.manifest.json").write_text(json.dumps({"solvers": ["gap", "bp"]}))
    assert read_csv(str(path)).solvers == ["bp", "omp-k"]

    (tmp_path / "grid.csv.manifest.json").write_text("[1, 2]")
    with pytest.raises(ContractViolation):
        read_csv(str(path))


def test_csv_without_timing_is_byte_stable(grid, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(grid, str(a), include_timing=False)
    grid.cells[("bp", 0.1, 0.1)].total_time = 123.0
    export_csv(grid, str(b), include_timing=False)
    assert a.read_bytes() == b.read_bytes()
    assert all(line.split(",")[6] == "0.0" for line in a.read_text().splitlines()[1:])


def test_csv_rejects_empty_grid_and_foreign_header(tmp_path):
    with pytest.raises(ContractViolation):
        export_csv(PhaseGrid(), str(tmp_path / "x.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ContractViolation):
        read_csv(str(bad))


def test_infinite_mean_error_survives_csv(grid, tmp_path):
    grid.cells[("bp", 0.1, 0.9)].mean_relative_error = math.inf
    path = tmp_path / "inf.csv"
    export_csv(grid, str(path))
    assert math.isinf(read_csv(str(path)).stats("bp", 0.1, 0.9).mean_relative_error)


def test_success_map_orientation(grid):
    # rows: rho ascending; columns: delta ascending
    assert success_map_rows(grid, "bp") == [[128, 255], [0, 64]]
    with pytest.raises(ContractViolation):
        success_map_rows(grid, "tst")


def test_success_map_pgm(grid, tmp_path):
    path = tmp_path / "maps" / "bp.pgm"
    export_success_map(grid, "bp", str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "P2"
    assert lines[1].startswith("#")
    assert lines[2:4] == ["2 2", "255"]
    assert lines[4:] == ["128 255", "0 64"]


def test_timing_table(grid):
    text = timing_table(grid).splitlines()
    assert text[0] == "Total running times (seconds)"
    assert text[1].split() == ["omp-k", "bp"]
    assert [float(v) for v in text[3].split()] == pytest.approx([3.0, 24.0])
    assert timing_table(grid, ["bp"]).splitlines()[1].split() == ["bp"]


def test_workbook_sheets(grid, tmp_path):
    path = tmp_path / "grid.xlsx"
    export_workbook(grid, str(path))
    wb = load_workbook(str(path))
    assert wb.sheetnames == ["Cells", "Timing", "map omp-k", "map bp"]
    cells = wb["Cells"]
    assert [c.value for c in cells[1]] == CSV_HEADER
    assert cells.max_row == 1 + len(grid.cells)
    bp_map = wb["map bp"]
    assert [c.value for c in bp_map[2]] == [0.1, 0.5, 1.0]


def test_manifest(tmp_path):
    spec = GridSpec(d=12, n_rows=14, delta_values=(0.5,), rho_values=(0.5,), trials_per_cell=1,
                    solvers=(SolverConfig("bp"),), master_seed=3)
    path = tmp_path / "run.manifest.json"
    write_manifest(spec, str(path), jobs=4)
    data = json.loads(path.read_text())
    assert data["solvers"] == ["bp"]
    assert (data["d"], data["n_rows"], data["master_seed"], data["jobs"]) == (12, 14, 3, 4)
