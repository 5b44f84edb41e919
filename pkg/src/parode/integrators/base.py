from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..control import classical_next_step
from ..core import MaxStepsExceeded, StepFailure, StepSizeUnderflow, as_state


@dataclass
class RunStats:
    corrections: int = 0
    accepted_steps: int = 0
    rejected_steps: int = 0
    rhs_evals: int = 0
    wall_time: float = 0.0


@dataclass
class Solution:
    """Accepted states of a run: ``t`` has shape (n,), ``y`` shape (n, d)."""

    t: np.ndarray
    y: np.ndarray
    stats: object = field(default_factory=RunStats)

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]

    @property
    def t_final(self) -> float:
        return float(self.t[-1])


def _pack(ts, ys):
    return np.asarray(ts, dtype=np.float64), np.vstack(ys) if ys else np.empty((0, 0))


def default_h_min(t0, t_end):
    return 1e-14 * (t_end - t0)


def fixed_step_integrate(stepper, t0, y0, t_end, h) -> Solution:
    """March with constant ``h``; the final step is shortened to land on ``t_end``.

    Grid points are computed as ``t0 + k*h`` so no drift accumulates.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if t_end < t0:
        raise ValueError("t_end must not precede t0")
    y = as_state(y0)
    stats = RunStats()
    start = time.perf_counter()
    ts, ys = [float(t0)], [y]
    n = math.ceil((t_end - t0) / h - 1e-9) if t_end > t0 else 0
    t = float(t0)
    for k in range(n):
        t_next = t_end if k == n - 1 else t0 + (k + 1) * h
        try:
            out = stepper.step(t, y, t_next - t)
        except StepFailure as exc:
            exc.stats = stats
            raise
        stats.rhs_evals += out.rhs_evals
        stats.accepted_steps += 1
        t, y = t_next, out.y_next
        ts.append(t)
        ys.append(y)
    stats.wall_time = time.perf_counter() - start
    return Solution(*_pack(ts, ys), stats)


def adaptive_integrate(stepper, t0, y0, t_end, tol, order, h0=None, h_min=None, max_steps=10**8) -> Solution:
    """Classical accept/reject loop: accept iff epsilon <= tol.

    Every attempt counts as one correction. The derivative at the current
    state is evaluated once and reused by retries after a rejection.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if t_end < t0:
        raise ValueError("t_end must not precede t0")
    y = as_state(y0)
    stats = RunStats()
    start = time.perf_counter()
    ts, ys = [float(t0)], [y]
    t = float(t0)
    h = float(t_end - t0) if h0 is None else float(h0)
    h_min = default_h_min(t0, t_end) if h_min is None else h_min
    k1 = None
    while t < t_end:
        if h < h_min:
            stats.wall_time = time.perf_counter() - start
            raise StepSizeUnderflow(f"step size {h:.3e} below h_min={h_min:.3e} at t={t!r}", stats, t)
        if stats.corrections >= max_steps:
            stats.wall_time = time.perf_counter() - start
            raise MaxStepsExceeded(f"exceeded {max_steps} step attempts at t={t!r}", stats, t)
        last = t + h >= t_end
        h_try = t_end - t if last else h
        stats.corrections += 1
        try:
            if k1 is None:
                k1 = stepper.derivative(t, y)
                stats.rhs_evals += 1
            out = stepper.step(t, y, h_try, k1)
            stats.rhs_evals += out.rhs_evals
            eps = out.epsilon
        except StepFailure as exc:
            stats.rhs_evals += exc.rhs_evals
            eps = math.inf
        if eps <= tol:
            stats.accepted_steps += 1
            t = t_end if last else t + h_try
            y = out.y_next
            k1 = None
            ts.append(t)
            ys.append(y)
        else:
            stats.rejected_steps += 1
        h = classical_next_step(h_try, eps, tol, order)
    stats.wall_time = time.perf_counter() - start
    return Solution(*_pack(ts, ys), stats)


class Stepper:
    """Common surface of the single-step schemes.

    ``step(t, y, h, k1=None)`` returns a :class:`~parode.core.StepOutcome`;
    ``k1`` is the derivative at (t, y) when the caller already has it, and the
    reported ``rhs_evals`` then excludes that evaluation.
    """

    name = ""
    order = 0
    embedded = False

    def __init__(self, system):
        self.system = system
        self._field = system.field
        self._params = system.params

    def derivative(self, t, y) -> np.ndarray:
        k = np.asarray(self._field(float(t), y, self._params), dtype=np.float64)
        if not np.isfinite(k).all():
            raise StepFailure(t, "non-finite derivative", rhs_evals=1)
        return k

    def step(self, t, y, h, k1=None):  # pragma: no cover - interface
        raise NotImplementedError

    def step_spans(self, t, y, spans, k1):
        """Independent steps of each span from one state whose derivative ``k1`` is known.

        Returns a list of ``(y_next, epsilon, rhs_evals)``; a non-finite step
        gives ``(None, inf, rhs_evals)``.
        """
        outcomes = []
        for h in spans:
            try:
                out = self.step(t, y, h, k1)
            except StepFailure as exc:
                outcomes.append((None, math.inf, exc.rhs_evals))
                continue
            outcomes.append((out.y_next, out.epsilon, out.rhs_evals))
        return outcomes
