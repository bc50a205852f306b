# cosparse_abs/features/recover.py
from __future__ import annotations

import argparse
import logging

from ..analysis_by_synthesis import recover
from ..bench import relative_error
from ..config import section
from ..container import load_instance
from ..io_types import JSONDict
from ..solvers import SolverConfig

log = logging.getLogger("cosparse_abs.recover")

def run(args: argparse.Namespace, cfg: JSONDict) -> int:
    op, inst = load_instance(args.path)
    solver = SolverConfig.from_config(args.solver, cfg)
    if args.subspace_block:
        solver = SolverConfig.from_config(args.solver, {**cfg, "abs": {"subspace_block": args.subspace_block}})
    report = recover(solver, op, inst.m_mat, inst.y, l=inst.l)
    err = relative_error(report.x_hat, inst.x)
    if report.flag:
        log.warning("%s stopped early: %s", report.solver_name, report.flag)
    tol = float(section(cfg, "bench.success_tol", 1e-6))
    print(f"solver          {report.solver_name}")
    print(f"instance        d={op.dim} N={op.n_rows} m={inst.m} l={inst.l}")
    print(f"iterations      {report.iterations}")
    print(f"residual_norm   {report.residual_norm:.3e}")
    print(f"elapsed_s       {report.elapsed:.4f}")
    print(f"converged       {report.converged}" + (f" ({report.flag})" if report.flag else ""))
    print(f"relative_error  {err:.3e}")
    print(f"success         {err < tol}")
    return 0

def setup(subparsers) -> None:
    p = subparsers.add_parser("recover", help="recover one serialized instance")
    p.add_argument("path")
    p.add_argument("--solver", default="bp")
    p.add_argument("--subspace-block", choices=["basis", "projector"], default=None)
    p.set_defaults(handler=run)
