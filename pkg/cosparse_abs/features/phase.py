# cosparse_abs/features/phase.py
# Subcommand: run the (delta, rho) phase-transition grid and write CSV / PGM / XLSX results.
#   phase --d 50 --n 60 --trials 20 --solvers omp-k,omp-eps,tst,bp,gap --jobs 4 \
#         --out-csv out/grid.csv --out-pgm-dir out/maps

from __future__ import annotations

import argparse
import logging
import os

from ..bench import GridSpec, run_grid
from ..config import section
from ..export import export_csv, export_success_map, export_workbook, manifest_path, timing_table, write_manifest
from ..io_types import JSONDict
from ..utils.parsing import parse_float_list, parse_name_list

log = logging.getLogger("cosparse_abs.phase")

def run(args: argparse.Namespace, cfg: JSONDict) -> int:
    spec = GridSpec.from_config(
        cfg,
        d=args.d,
        n_rows=args.n,
        delta_values=parse_float_list(args.delta) if args.delta else None,
        rho_values=parse_float_list(args.rho) if args.rho else None,
        trials_per_cell=args.trials,
        solvers=parse_name_list(args.solvers) if args.solvers else None,
        master_seed=args.seed,
        regenerate_operator=True if args.regenerate_operator else None,
    )
    jobs = args.jobs if args.jobs is not None else int(section(cfg, "bench.jobs", 1))
    grid = run_grid(spec, jobs=max(1, jobs), cfg=cfg)

    if args.out_csv:
        export_csv(grid, args.out_csv, include_timing=not args.omit_timing)
        write_manifest(spec, manifest_path(args.out_csv), jobs)
    if args.out_pgm_dir:
        for name in grid.solvers:
            export_success_map(grid, name, os.path.join(args.out_pgm_dir, f"{name}.pgm"))
    if args.out_xlsx:
        export_workbook(grid, args.out_xlsx)

    log.info("grid finished: %d solver cells", len(grid.cells))
    print(timing_table(grid))
    for name in grid.solvers:
        print(f"{name}: mean success rate {grid.mean_success_rate(name):.3f}")
    return 0

def setup(subparsers) -> None:
    p = subparsers.add_parser("phase", help="run a phase-transition grid")
    p.add_argument("--d", type=int, default=None, help="signal dimension (default 200)")
    p.add_argument("--n", type=int, default=None, help="rows of the analysis operator (default 240)")
    p.add_argument("--delta", default=None, help="delta values: 'a,b,c' or 'start:stop:step'")
    p.add_argument("--rho", default=None, help="rho values: 'a,b,c' or 'start:stop:step'")
    p.add_argument("--trials", type=int, default=None, help="trials per cell (default 100)")
    p.add_argument("--solvers", default=None, help="comma-separated solver names")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-pgm-dir", default=None)
    p.add_argument("--out-xlsx", default=None)
    p.add_argument("--omit-timing", action="store_true", help="write total_time_s as 0 for byte-stable CSV")
    p.add_argument("--regenerate-operator", action="store_true", help="draw a fresh operator per cell")
    p.set_defaults(handler=run)
