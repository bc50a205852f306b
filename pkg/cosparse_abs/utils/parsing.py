from __future__ import annotations
import re
from typing import List

from ..errors import ConfigError

def normalize(name: str) -> str:
    """Case-fold and collapse separators: 'OMP_eps', 'omp eps', 'OMP-Eps' -> 'omp-eps'."""
    s = (name or "").strip().casefold()
    s = s.replace("ε", "eps").replace("ϵ", "eps")
    return re.sub(r"[\s_]+", "-", s)

def _round_grid(v: float) -> float:
    # strips float noise from start + i*step
    return float(round(v, 10))

def parse_float_list(token: str) -> List[float]:
    """
    '0.1,0.5,0.9'  -> [0.1, 0.5, 0.9]
    '0.05:0.95:0.05' -> inclusive range
    """
    t = (token or "").strip()
    if not t:
        raise ConfigError("empty numeric list")
    try:
        if ":" in t:
            parts = [float(p) for p in t.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ConfigError(f"range must be start:stop:step with step > 0, got {token!r}")
            start, stop, step = parts
            count = int(round((stop - start) / step)) + 1
            return [_round_grid(start + i * step) for i in range(max(0, count))]
        return [float(p) for p in t.split(",") if p.strip()]
    except ValueError as e:
        raise ConfigError(f"not a numeric list: {token!r}") from e

def parse_name_list(token: str) -> List[str]:
    return [normalize(p) for p in (token or "").split(",") if p.strip()]
