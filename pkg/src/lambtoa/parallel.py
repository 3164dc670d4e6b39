"""Order-preserving parallel map, capped by the LAMB_TOA_THREADS env var."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("LAMB_TOA_THREADS", "1")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def par_map(fn, items):
    """Map fn over items, in parallel when LAMB_TOA_THREADS > 1.

    Results are assembled in input order, so output is independent of
    scheduling.
    """
    items = list(items)
    workers = min(thread_cap(), len(items)) if items else 1
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
