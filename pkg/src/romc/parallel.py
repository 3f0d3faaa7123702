"""Order-preserving process-pool map.

Every parallel phase in the package is a pure map over task indices whose
randomness is derived from ``(seed, index)``; results come back in input
order, so the worker count never changes an output.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # not available on macOS / Windows
        return os.cpu_count() or 1


def ordered_map(fn: Callable, items: Iterable, workers: Optional[int] = 1) -> list:
    """``list(map(fn, items))``, spread over ``workers`` processes when ``workers > 1``.

    ``fn`` and the items must be picklable.
    """
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunksize = max(1, math.ceil(len(items) / (4 * workers)))
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
