"""Small shared helpers: thread budget, canonical formatting, chunked work."""
from __future__ import annotations

import json
import os

import numpy as np

_THREADS_ENV = "ATTRSPARSE_THREADS"


def worker_count() -> int:
    """Worker cap from the ATTRSPARSE_THREADS env var (default 1, min 1)."""
    raw = os.environ.get(_THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def fmt_float(x) -> str:
    """Shortest decimal string that round-trips the float bit-exactly."""
    return repr(float(x))


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def chunk_bounds(n: int, chunk: int):
    """Yield (start, stop) pairs covering range(n) in order."""
    start = 0
    while start < n:
        stop = min(start + chunk, n)
        yield start, stop
        start = stop


def as_1d_float(x, name="array") -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {a.shape}")
    return a
