"""Adaptive stepsize parallel algorithm.

Each iteration launches N probes from the current state; probe i takes one
embedded step of span i*h_n. With m the largest index whose error estimate is
within tolerance, the state jumps to probe m's result (no move when m = 0) and
the next base step is h_{n+1} = ratio(m, N) * h_n.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .control import aspa_ratio, linear_ratio, select_m
from .core import IntegrationError, MaxStepsExceeded, StepFailure, StepSizeUnderflow, as_state
from .integrators.base import Solution, default_h_min
from .integrators.dop853 import Dop853
from .parallel import ProbeExecutor, make_probe_tasks, probe_batch, worker_pool_size

RECURRENCES = ("auto", "damped", "linear")


@dataclass(frozen=True)
class AspaConfig:
    """Run parameters.

    ``h0=None`` starts from (t_end - t0) / n_cpu. ``workers`` is the number of
    physical threads (default ``n_cpu``, capped at the host's core count); it
    never changes the result. ``recurrence="auto"`` uses the damped map for
    N >= 3 and the undamped ``2m/N + 1/(2N)`` rule below that, where the damped
    map cannot grow h.
    """

    n_cpu: int
    tol: float
    h0: Optional[float] = None
    h_min: Optional[float] = None
    max_steps: int = 10**7
    workers: Optional[int] = None
    recurrence: str = "auto"

    def __post_init__(self):
        if self.n_cpu < 1:
            raise ValueError("n_cpu must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.recurrence not in RECURRENCES:
            raise ValueError(f"recurrence must be one of {RECURRENCES}")

    @property
    def fixed_point_free(self) -> bool:
        return self.n_cpu >= 3

    def ratio_fn(self) -> Callable[[int, int], float]:
        if self.recurrence == "linear" or (self.recurrence == "auto" and self.n_cpu < 3):
            return linear_ratio
        return aspa_ratio


@dataclass
class AspaStats:
    """Per-run trace. ``h_history[n]`` is the base step probed at iteration n
    (after end-of-interval rescaling); its last entry is the next proposal, so
    ``len(h_history) == corrections + 1``."""

    h_history: list = field(default_factory=list)
    m_history: list = field(default_factory=list)
    corrections: int = 0
    accepted_steps: int = 0
    total_rhs_evals: int = 0
    wall_time: float = 0.0

    @property
    def rhs_evals(self) -> int:
        return self.total_rhs_evals

    def trace_rows(self):
        """(n, h_n, m_n) rows; the final row carries the unused proposal and m_n=None."""
        ms = self.m_history + [None]
        return [(n, h, m) for n, (h, m) in enumerate(zip(self.h_history, ms))]


def aspa_integrate(sys, t0, y0, t_end, cfg: AspaConfig, inner=Dop853,
                   executor: Optional[ProbeExecutor] = None) -> Solution:
    """Integrate from ``t0`` to ``t_end`` with speculative probe batches.

    ``inner`` builds an embedded stepper from the system (default DOP853).
    When the probe set would overshoot ``t_end`` the base step is rescaled
    so probe N lands on it exactly.
    """
    if t_end < t0:
        raise ValueError("t_end must not precede t0")
    n = cfg.n_cpu
    probe_stepper = inner(sys)
    if not getattr(probe_stepper, "embedded", False):
        raise ValueError(f"inner stepper {getattr(probe_stepper, 'name', inner)!r} has no error estimate")
    if n < 3 and cfg.recurrence != "linear":
        warnings.warn(f"n_cpu={n} < 3: the damped recurrence has no growth branch; "
                      f"using the {'undamped rule' if cfg.recurrence == 'auto' else 'damped map anyway'}",
                      stacklevel=2)
    ratio = cfg.ratio_fn()
    y = as_state(y0, sys.dimension)
    t = float(t0)
    h = (t_end - t0) / n if cfg.h0 is None else float(cfg.h0)
    h_min = default_h_min(t0, t_end) if cfg.h_min is None else cfg.h_min
    stats = AspaStats()
    ts, ys = [t], [y]

    def factory():
        return inner(sys)

    own = executor is None
    if own:
        executor = ProbeExecutor(worker_pool_size(cfg.workers or n))
    start = time.perf_counter()
    k1 = None
    try:
        while t < t_end:
            if h < h_min:
                raise StepSizeUnderflow(f"step size {h:.3e} below h_min={h_min:.3e} at t={t!r}", stats, t)
            if stats.corrections >= cfg.max_steps:
                raise MaxStepsExceeded(f"exceeded {cfg.max_steps} iterations at t={t!r}", stats, t)
            truncated = t + n * h > t_end
            h_used = (t_end - t) / n if truncated else h
            if k1 is None:
                try:
                    k1 = probe_stepper.derivative(t, y)
                except StepFailure as exc:
                    raise IntegrationError(str(exc), stats, t) from exc
                stats.total_rhs_evals += 1
            results = probe_batch(make_probe_tasks(t, y, h_used, n, k1), factory, cfg.tol, executor)
            m = select_m([r.epsilon for r in results], cfg.tol)
            stats.total_rhs_evals += sum(r.rhs_evals for r in results)
            stats.h_history.append(h_used)
            stats.m_history.append(m)
            stats.corrections += 1
            if m > 0:
                t = t_end if (truncated and m == n) else t + m * h_used
                y = results[m - 1].y_probe
                k1 = None
                stats.accepted_steps += 1
                ts.append(t)
                ys.append(y)
            h = ratio(m, n) * h_used
        stats.h_history.append(h)
    finally:
        stats.wall_time = time.perf_counter() - start
        if own:
            executor.close()
    return Solution(np.asarray(ts), np.vstack(ys), stats)


def is_progressing(m_history, window) -> bool:
    """True when every run of ``window`` consecutive iterations has some m > 0."""
    streak = 0
    for m in m_history:
        streak = 0 if m > 0 else streak + 1
        if streak >= window:
            return False
    return True


def second_half(values):
    values = list(values)
    return values[len(values) // 2:]


def oscillation_summary(stats: AspaStats) -> dict:
    """Spread of h_n and mean m_n over the second half of a run."""
    hs = np.asarray(second_half(stats.h_history[:-1]))
    ms = np.asarray(second_half(stats.m_history))
    if hs.size == 0:
        return {"h_spread": math.nan, "m_mean": math.nan, "h_max": math.nan}
    return {"h_spread": float(hs.max() / hs.min()), "m_mean": float(ms.mean()), "h_max": float(hs.max())}
