# cosparse_abs/features/oracle.py
from __future__ import annotations

import argparse
import logging

from ..analysis_by_synthesis import abs_recover, recover
from ..bench import relative_error
from ..container import load_instance
from ..io_types import JSONDict
from ..model import RngSeed, generate_tight_frame, instance_from_counts
from ..solvers import SolverConfig, SolverKind

log = logging.getLogger("cosparse_abs.oracle")

def run(args: argparse.Namespace, cfg: JSONDict) -> int:
    if args.path:
        op, inst = load_instance(args.path)
    else:
        seed = RngSeed(args.seed)
        op = generate_tight_frame(args.n, args.d, seed.child(0))
        inst = instance_from_counts(op, args.m, args.l, seed.child(1))

    log.info("enumerating oracles on d=%d N=%d m=%d", op.dim, op.n_rows, inst.m)
    analysis = recover(SolverConfig.from_config(SolverKind.ORACLE_ANALYSIS, cfg), op, inst.m_mat, inst.y)
    synthesis = abs_recover(op, inst.m_mat, inst.y, SolverConfig.from_config(SolverKind.ORACLE_SYNTHESIS, cfg))

    print(f"instance              d={op.dim} N={op.n_rows} m={inst.m} l={inst.l}")
    print(f"analysis oracle       l={analysis.extras.get('level')} unique={analysis.extras.get('unique')} "
          f"error={relative_error(analysis.x_hat, inst.x):.3e}")
    print(f"ABS synthesis oracle  k={synthesis.extras.get('level')} unique={synthesis.extras.get('unique')} "
          f"error={relative_error(synthesis.x_hat, inst.x):.3e}")
    print(f"agreement             {relative_error(synthesis.x_hat, analysis.x_hat):.3e}")
    return 0

def setup(subparsers) -> None:
    p = subparsers.add_parser("oracle", help="compare the exhaustive oracles on a small instance")
    p.add_argument("--path", default=None, help="serialized instance (otherwise generate one)")
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--l", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=run)
