from __future__ import annotations
import json
import logging
import os
from datetime import datetime, timezone
from typing import Any, Callable, Dict, Tuple, Type, TypeVar

T = TypeVar("T")

log = logging.getLogger("cosparse_abs.io")

def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()

def retry(factory: Callable[[], T], attempts: int = 3,
          catch: Tuple[Type[BaseException], ...] = (Exception,), ctx: str = "retry") -> T:
    """Call factory until it returns; re-raise the last error after `attempts` failures."""
    last = None
    for i in range(1, max(1, attempts) + 1):
        try:
            return factory()
        except catch as e:
            last = e
            log.debug("%s: attempt %d/%d failed: %s", ctx, i, attempts, e)
    assert last is not None
    raise last

def ensure_parent(path: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)

def write_json(path: str, payload: Dict[str, Any]) -> None:
    ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2)
