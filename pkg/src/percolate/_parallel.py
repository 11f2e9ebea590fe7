"""Deterministic chunked execution of independent trials."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

R = TypeVar("R")

CHUNK = 4096


def chunk_bounds(trials: int, chunk: int = CHUNK) -> list[tuple[int, int]]:
    return [(a, min(a + chunk, trials)) for a in range(0, trials, chunk)]


def run_chunks(fn: Callable[[int, int], R], trials: int, threads: int = 1, chunk: int = CHUNK) -> list[R]:
    """Apply fn(a, b) to fixed trial ranges and return results in range order.

    Chunk boundaries do not depend on ``threads``, so any reduction over the
    returned list is schedule-independent.  Kernels release the GIL.
    """
    bounds = chunk_bounds(trials, chunk)
    if threads <= 1 or len(bounds) <= 1:
        return [fn(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda ab: fn(*ab), bounds))
