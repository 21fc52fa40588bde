"""Deterministic per-task random streams and an order-preserving task runner.

Every independent unit of work (a trial, a block of trials) draws from the
stream ``SeedSequence(seed, spawn_key=key)``, where ``key`` is the unit's
index tuple.  Results are gathered in key order, so the worker count never
changes any output.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

SEED_ENV = "CONTPERC_SEED"
MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key)))


def run_tasks(fn: Callable[[T], R], tasks: Sequence[T] | Iterable[T], workers: int = 1) -> list[R]:
    """Apply ``fn`` to each task, returning results in task order."""
    tasks = list(tasks)
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    workers = min(workers, len(tasks), os.cpu_count() or 1)
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))
