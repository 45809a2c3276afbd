"""Deterministic fan-out for parameter sweeps.

Worker count comes from the HELMHOLTZ_LAB_THREADS environment variable and
defaults to one, which keeps every run single-process unless asked.
Results always come back in input order, so sweep output does not depend
on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import DataError

ENV_THREADS = "HELMHOLTZ_LAB_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_THREADS, "1")
    try:
        n = int(raw)
    except ValueError:
        raise DataError(f"{ENV_THREADS} must be an integer, got {raw!r}")
    return max(1, n)


def parallel_map(fn, items):
    """[fn(x) for x in items], fanned out across processes when configured.

    fn must be picklable (module-level) for the multi-process path.
    """
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
