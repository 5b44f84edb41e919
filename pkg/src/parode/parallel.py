"""Deterministic fork/join execution of independent probe steps.

The contract is simple: N logical tasks are split into contiguous chunks, each
chunk runs on one worker thread with its own stepper, and results are joined
in index order. A task never sees another task's state, so the output does not
depend on how many threads ran it. Real speedup needs compiled (``nogil``)
vector fields; pure-Python fields still run correctly but serialize on the GIL.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import StepFailure


def available_cpus() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def worker_pool_size(requested: int, available: Optional[int] = None) -> int:
    if requested < 1:
        raise ValueError("requested worker count must be >= 1")
    if available is None:
        available = available_cpus()
    return max(1, min(requested, available))


def chunk_bounds(n: int, chunks: int) -> list[tuple[int, int]]:
    """Split range(n) into ``chunks`` contiguous, nearly equal pieces."""
    chunks = max(1, min(chunks, n))
    base, extra = divmod(n, chunks)
    bounds = []
    lo = 0
    for i in range(chunks):
        hi = lo + base + (1 if i < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


class ProbeExecutor:
    """A fixed pool of ``workers`` threads; ``workers == 1`` runs inline.

    Use as a context manager, or call :meth:`close` when done.
    """

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.workers = workers
        self._pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def map_chunks(self, fn: Callable[[int, int], list], n: int) -> list:
        """Run ``fn(lo, hi)`` over contiguous chunks of range(n); concatenate in order."""
        if self._pool is None or n <= 1:
            return list(fn(0, n))
        futures = [self._pool.submit(fn, lo, hi) for lo, hi in chunk_bounds(n, self.workers)]
        out = []
        for fut in futures:
            out.extend(fut.result())
        return out

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass(frozen=True)
class ProbeTask:
    index: int
    span: float
    t: float
    y: np.ndarray
    # derivative at (t, y), shared by all probes of a batch
    k_start: Optional[np.ndarray] = None


@dataclass(frozen=True)
class ProbeResult:
    index: int
    y_probe: Optional[np.ndarray]
    epsilon: float
    rhs_evals: int
    success: bool


def make_probe_tasks(t, y, h, n, k_start=None) -> list[ProbeTask]:
    # span is index * h, never a running sum
    return [ProbeTask(i, i * h, t, y, k_start) for i in range(1, n + 1)]


def probe_batch(
    tasks: Sequence[ProbeTask],
    stepper_factory: Callable[[], object],
    tol: float,
    executor: Optional[ProbeExecutor] = None,
) -> list[ProbeResult]:
    """Run one embedded step per task and judge each against ``tol``.

    A probe whose arithmetic goes non-finite is reported as a failure with
    ``epsilon = inf``; it does not abort the batch.
    """
    for expected, task in enumerate(tasks, start=1):
        if task.index != expected:
            raise ValueError(f"probe tasks must be indexed 1..N without gaps (got {task.index} at {expected})")

    def run(lo, hi):
        stepper = stepper_factory()
        chunk = tasks[lo:hi]
        first = chunk[0] if chunk else None
        shared = first is not None and first.k_start is not None and all(
            task.t == first.t and task.y is first.y and task.k_start is first.k_start for task in chunk
        )
        if shared:
            outcomes = stepper.step_spans(first.t, first.y, [task.span for task in chunk], first.k_start)
        else:
            outcomes = []
            for task in chunk:
                try:
                    out = stepper.step(task.t, task.y, task.span, task.k_start)
                except StepFailure as exc:
                    outcomes.append((None, math.inf, exc.rhs_evals))
                    continue
                outcomes.append((out.y_next, out.epsilon, out.rhs_evals))
        return [
            ProbeResult(task.index, y_probe, eps, evals, eps <= tol)
            for task, (y_probe, eps, evals) in zip(chunk, outcomes)
        ]

    if executor is None:
        return run(0, len(tasks))
    return executor.map_chunks(run, len(tasks))
