# cosparse_abs/logging_setup.py
import logging
import sys

# processName tells pool workers apart during grid runs
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(processName)s | %(name)s | %(message)s"

def level_from_flags(verbose: bool = False, quiet: bool = False) -> int:
    if verbose:
        return logging.DEBUG
    return logging.WARNING if quiet else logging.INFO

def init_logging(level: int = logging.INFO) -> None:
    """
    Console logging on stdout. A second call only changes the level.
    """
    root = logging.getLogger()
    pkg = logging.getLogger("cosparse_abs")
    pkg.setLevel(level)
    if root.handlers:
        return

    handler = logging.StreamHandler(stream=sys.stdout)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.setLevel(level)
    root.addHandler(handler)
