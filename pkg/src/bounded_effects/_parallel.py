"""Ordered parallel map governed by ``BOUNDED_EFFECTS_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "BOUNDED_EFFECTS_THREADS"


def worker_count(requested=None) -> int:
    """Threads to use: explicit request, else the env var (0 = all cores), else 1."""
    if requested is None:
        raw = os.environ.get(ENV_VAR, "").strip()
        if not raw:
            return 1
        try:
            requested = int(raw)
        except ValueError:
            return 1
    requested = int(requested)
    if requested <= 0:
        return os.cpu_count() or 1
    return requested


def ordered_map(fn, items, threads=None) -> list:
    """``[fn(x) for x in items]``, possibly threaded; output order always matches input."""
    items = list(items)
    k = min(worker_count(threads), max(len(items), 1))
    if k <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))
