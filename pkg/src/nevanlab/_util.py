"""Shared plumbing: worker pools and seed resolution."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """Map fn over items, optionally on a thread pool.

    Results always come back in input order, so callers stay deterministic
    regardless of worker count.  The heavy kernels release no locks worth
    fighting over below jobs=2, hence the serial shortcut.
    """
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def resolve_seed(seed: int | None) -> int:
    """Explicit seed, else NEVANLAB_SEED from the environment, else 42."""
    if seed is not None:
        return seed
    env = os.environ.get("NEVANLAB_SEED")
    if env is not None:
        return int(env)
    return 42
