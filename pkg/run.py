# run.py
# Launcher from a source checkout: python run.py <command> [flags]

import os
import sys

ROOT = os.path.abspath(os.path.dirname(__file__))

def _launch_error(exc: ImportError) -> int:
    entries = ", ".join(sorted(e for e in os.listdir(ROOT) if not e.startswith(".")))
    print("cosparse-abs: cannot import the package", file=sys.stderr)
    print(f"  cause: {type(exc).__name__}: {exc}", file=sys.stderr)
    print(f"  root:  {ROOT} ({entries})", file=sys.stderr)
    print("  needs cosparse_abs/ next to run.py and the packages in requirements.txt", file=sys.stderr)
    return 1

if __name__ == "__main__":
    sys.path.insert(0, ROOT)
    try:
        from cosparse_abs.main import main
    except ImportError as e:
        sys.exit(_launch_error(e))
    sys.exit(main(sys.argv[1:]))
