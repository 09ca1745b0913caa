"""Deterministic seeding and a thread map with order-preserving merge.

Randomized pieces derive their RNG from blake2b-hashed (seed, *labels) keys so
results never depend on scheduling, iteration order of other components, or
thread count.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def split_seed(seed: int, *labels) -> int:
    """Derive an independent 64-bit stream from a master seed and labels."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for lab in labels:
        h.update(b"/")
        h.update(str(lab).encode())
    return int.from_bytes(h.digest(), "big")


def rng_for(seed: int, *labels) -> random.Random:
    return random.Random(split_seed(seed, *labels))


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Map preserving input order.  With threads > 1 the work runs on a pool;
    results are merged back positionally, so output is identical to the serial
    run as long as fn is pure."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
