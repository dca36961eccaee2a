"""Deterministic chunked reductions.

Items are split into chunks whose boundaries do not depend on the thread
count; each chunk is summed in order and the partial sums are combined in
chunk order.  Serial and threaded runs therefore give bitwise equal results.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

CHUNK = 64


def ordered_sum(term: Callable, items: Sequence, threads: int = 1, chunk: int = CHUNK):
    """sum(term(x) for x in items) with a fixed association order."""
    if threads < 1:
        raise ValueError("threads must be >= 1")
    bounds = [(i, min(i + chunk, len(items))) for i in range(0, len(items), chunk)]
    if not bounds:
        raise ValueError("nothing to sum")

    def partial(b):
        lo, hi = b
        acc = term(items[lo])
        for k in range(lo + 1, hi):
            acc = acc + term(items[k])
        return acc

    if threads == 1:
        parts = [partial(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(partial, bounds))
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total
