# cosparse_abs/export.py
from __future__ import annotations

import csv
import json
import logging
import os
from typing import List, Optional, Sequence

from openpyxl import Workbook
from openpyxl.worksheet.worksheet import Worksheet

from .bench import CellStats, GridSpec, PhaseGrid
from .errors import ContractViolation
from .io_types import JSONDict
from .model import round_half_up
from .utils.io_helpers import ensure_parent, now_iso, write_json

log = logging.getLogger("cosparse_abs.export")

CSV_HEADER = ["solver", "delta", "rho", "successes", "trials", "success_rate", "total_time_s", "mean_rel_err"]


def _num(v: float) -> str:
    # repr is the shortest string that round-trips
    return repr(float(v))


# ---- CSV ----
def export_csv(grid: PhaseGrid, path: str, include_timing: bool = True) -> None:
    if grid.is_empty():
        raise ContractViolation("cannot export an empty grid")
    ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for (solver, delta, rho), s in sorted(grid.cells.items()):
            w.writerow([
                solver, _num(delta), _num(rho), s.successes, s.trials, _num(s.success_rate),
                _num(s.total_time if include_timing else 0.0), _num(s.mean_relative_error),
            ])
    log.info("wrote %s (%d rows)", path, len(grid.cells))

def manifest_path(csv_path: str) -> str:
    return csv_path + ".manifest.json"

def _ordered(found: List, preferred: Optional[Sequence]) -> List:
    """found in the order of preferred when it lists exactly the same values."""
    if preferred is not None and sorted(preferred) == sorted(found):
        return list(preferred)
    return sorted(found)

def read_csv(path: str, manifest: Optional[str] = None) -> PhaseGrid:
    """
    Re-import an exported grid. Solver, delta and rho order come from the run
    manifest (default `<path>.manifest.json`) when one is present; without it
    every axis comes back sorted.
    """
    grid = PhaseGrid()
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ContractViolation(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            solver, delta, rho = row["solver"], float(row["delta"]), float(row["rho"])
            grid.cells[(solver, delta, rho)] = CellStats(
                successes=int(row["successes"]),
                trials=int(row["trials"]),
                total_time=float(row["total_time_s"]),
                mean_relative_error=float(row["mean_rel_err"]),
            )
    names = {k[0] for k in grid.cells}
    deltas = {k[1] for k in grid.cells}
    rhos = {k[2] for k in grid.cells}

    manifest = manifest or manifest_path(path)
    order: JSONDict = {}
    if os.path.exists(manifest):
        with open(manifest, "r", encoding="utf-8") as f:
            try:
                order = json.load(f)
            except json.JSONDecodeError as e:
                raise ContractViolation(f"{manifest}: {e}") from e
        if not isinstance(order, dict):
            raise ContractViolation(f"{manifest}: top level must be an object")
    grid.solvers = _ordered(list(names), order.get("solvers"))
    grid.delta_values = _ordered(list(deltas), order.get("delta_values"))
    grid.rho_values = _ordered(list(rhos), order.get("rho_values"))
    if order and grid.solvers != order.get("solvers"):
        log.warning("%s does not match the solvers in %s; using sorted order", manifest, path)
    return grid


# ---- Success maps ----
def success_map_rows(grid: PhaseGrid, solver: str) -> List[List[int]]:
    """Pixel rows: rho increases downward, delta rightward, pixel = round(255 * rate)."""
    if solver not in grid.solvers:
        raise ContractViolation(f"solver {solver!r} not in grid (have {', '.join(grid.solvers)})")
    return [
        [round_half_up(255 * grid.success_rate(solver, delta, rho)) for delta in sorted(grid.delta_values)]
        for rho in sorted(grid.rho_values)
    ]

def export_success_map(grid: PhaseGrid, solver: str, path: str) -> None:
    rows = success_map_rows(grid, solver)
    width = len(grid.delta_values)
    ensure_parent(path)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(f"P2\n# success rate of {solver}; columns: delta, rows: rho\n{width} {len(rows)}\n255\n")
        for row in rows:
            f.write(" ".join(str(p) for p in row) + "\n")
    log.info("wrote %s", path)


# ---- Timing ----
def timing_table(grid: PhaseGrid, solvers: Optional[Sequence[str]] = None) -> str:
    """Per-solver total wall-clock over the whole grid, one column per solver."""
    if grid.is_empty():
        raise ContractViolation("cannot tabulate an empty grid")
    names = list(solvers or grid.solvers)
    values = [f"{grid.total_time(n):.3f}" for n in names]
    widths = [max(len(n), len(v)) for n, v in zip(names, values)]
    header = "  ".join(n.rjust(w) for n, w in zip(names, widths))
    rule = "  ".join("-" * w for w in widths)
    row = "  ".join(v.rjust(w) for v, w in zip(values, widths))
    return "\n".join(["Total running times (seconds)", header, rule, row])


# ---- XLSX (openpyxl) ----
def wb_add_header(ws: Worksheet, headers: List[str]) -> None:
    ws.append(headers)
    ws.freeze_panes = "A2"

def export_workbook(grid: PhaseGrid, path: str) -> None:
    if grid.is_empty():
        raise ContractViolation("cannot export an empty grid")
    wb = Workbook()
    ws = wb.active
    ws.title = "Cells"
    wb_add_header(ws, CSV_HEADER)
    for (solver, delta, rho), s in sorted(grid.cells.items()):
        ws.append([solver, delta, rho, s.successes, s.trials, s.success_rate, s.total_time, s.mean_relative_error])

    timing = wb.create_sheet("Timing")
    wb_add_header(timing, ["solver", "total_time_s", "mean_success_rate"])
    for name in grid.solvers:
        timing.append([name, grid.total_time(name), grid.mean_success_rate(name)])

    deltas = sorted(grid.delta_values)
    for name in grid.solvers:
        # sheet titles are capped at 31 characters
        sheet = wb.create_sheet(f"map {name}"[:31])
        wb_add_header(sheet, ["rho \\ delta"] + deltas)
        for rho in sorted(grid.rho_values):
            sheet.append([rho] + [grid.success_rate(name, delta, rho) for delta in deltas])
    ensure_parent(path)
    wb.save(path)
    log.info("wrote %s", path)


# ---- Run manifest ----
def write_manifest(spec: GridSpec, path: str, jobs: int) -> None:
    write_json(path, {
        "written_at_iso": now_iso(),
        "d": spec.d,
        "n_rows": spec.n_rows,
        "delta_values": list(spec.delta_values),
        "rho_values": list(spec.rho_values),
        "trials_per_cell": spec.trials_per_cell,
        "success_tol": spec.success_tol,
        "master_seed": spec.master_seed,
        "regenerate_operator": spec.regenerate_operator,
        "solvers": [s.name for s in spec.solvers],
        "jobs": jobs,
    })
