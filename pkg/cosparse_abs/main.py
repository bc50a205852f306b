# cosparse_abs/main.py
from __future__ import annotations

import argparse
import importlib
import logging
import sys
from typing import List, Optional

from .config import apply_config, load_config
from .errors import AbsError
from .logging_setup import init_logging, level_from_flags

log = logging.getLogger("cosparse_abs")

# each module exposes setup(subparsers) and registers one subcommand
EXTENSIONS = [
    "cosparse_abs.features.phase",
    "cosparse_abs.features.recover",
    "cosparse_abs.features.gen",
    "cosparse_abs.features.oracle",
]

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosparse-abs",
        description="Analysis-by-synthesis recovery of cosparse signals and phase-transition benchmarks.",
    )
    parser.add_argument("--config", default=None, help="JSON config file (default: $ABS_CONFIG_PATH or the shipped cosparse_abs/data/config.json)")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for ext in EXTENSIONS:
        importlib.import_module(ext).setup(subparsers)
    return parser

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    init_logging(level_from_flags(args.verbose, args.quiet))
    try:
        cfg = load_config(args.config)
        apply_config(cfg)
        return int(args.handler(args, cfg) or 0)
    except AbsError as e:
        log.error("%s: %s", type(e).__name__, e)
        return 2
    except OSError as e:
        log.error("I/O error: %s", e)
        return 1

if __name__ == "__main__":
    sys.exit(main())
