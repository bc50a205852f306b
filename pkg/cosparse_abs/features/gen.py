# cosparse_abs/features/gen.py
from __future__ import annotations

import argparse
import logging

from ..config import save_config, section
from ..container import save_instance
from ..io_types import JSONDict
from ..model import RngSeed, generate_tight_frame, instance_from_counts, make_instance

log = logging.getLogger("cosparse_abs.gen")

def run(args: argparse.Namespace, cfg: JSONDict) -> int:
    if args.dump_config:
        save_config(cfg, args.dump_config)
        log.info("wrote merged config to %s", args.dump_config)
        if not args.out:
            return 0
    if not args.out:
        log.error("gen needs --out (or --dump-config)")
        return 2
    explicit = args.m is not None or args.l is not None
    if explicit and (args.m is None or args.l is None):
        log.error("--m and --l go together")
        return 2
    d = args.d or int(section(cfg, "bench.d"))
    n = args.n or int(section(cfg, "bench.n_rows"))
    seed = RngSeed(args.seed)
    op = generate_tight_frame(n, d, seed.child(0))
    if explicit:
        inst = instance_from_counts(op, args.m, args.l, seed.child(1))
    else:
        inst = make_instance(op, args.delta, args.rho, seed.child(1))
    save_instance(args.out, op, inst)
    log.info("wrote %s: d=%d N=%d m=%d l=%d", args.out, d, n, inst.m, inst.l)
    return 0

def setup(subparsers) -> None:
    p = subparsers.add_parser("gen", help="generate and serialize one instance")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--m", type=int, default=None, help="explicit measurement count (with --l)")
    p.add_argument("--l", type=int, default=None, help="explicit cosparsity (with --m)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--dump-config", default=None, help="also write the merged config here")
    p.set_defaults(handler=run)
