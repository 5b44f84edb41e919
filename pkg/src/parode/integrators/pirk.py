"""Parallel iterated Runge-Kutta: fixed-point iteration of an implicit tableau.

Stage values start from the derivative at the step origin and are refined
``m`` times; all ``s`` stage evaluations of one iteration level are
independent and may run on separate workers. The difference between the last
two iterates gives the error estimate. With ``m`` iterations the scheme has
order ``min(p0, m + 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import ButcherTableau, StepFailure, StepOutcome, as_state
from ..parallel import ProbeExecutor
from ..tableaus import gauss10_tableau
from ._kernels import pirk_finish, pirk_stage_inputs, specialize
from .base import Solution, Stepper, adaptive_integrate


@dataclass(frozen=True)
class PirkConfig:
    base: ButcherTableau = field(default_factory=gauss10_tableau)
    m: int = 9
    workers: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("PIRK needs m >= 1 iterations")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def order(self) -> int:
        return min(self.base.p0, self.m + 1)


class Pirk(Stepper):
    name = "pirk"
    embedded = True

    def __init__(self, system, cfg: Optional[PirkConfig] = None, executor: Optional[ProbeExecutor] = None):
        super().__init__(system)
        self.cfg = PirkConfig() if cfg is None else cfg
        self.order = self.cfg.order
        self._kernel = specialize("pirk", self._field, system.compiled)
        base = self.cfg.base
        self._A = np.ascontiguousarray(base.A)
        self._b = np.ascontiguousarray(base.b)
        self._c = np.ascontiguousarray(base.c)
        self._executor = executor

    def step(self, t, y, h, k1=None) -> StepOutcome:
        s, m = self._b.size, self.cfg.m
        evals = m * s
        if k1 is None:
            k1 = self.derivative(t, y)
            evals += 1
        t, h = float(t), float(h)
        if self._executor is None or self._executor.workers == 1:
            y_next, eps = self._kernel(self._params, t, y, h, self._A, self._b, self._c, m, k1)
        else:
            y_next, eps = self._stage_parallel(t, y, h, k1)
        if not (eps < np.inf and np.isfinite(y_next).all()):
            raise StepFailure(t, rhs_evals=evals)
        return StepOutcome(y_next, eps, evals)

    def _stage_parallel(self, t, y, h, k1):
        s, d = self._b.size, y.size
        K = np.empty((s, d))
        K[:] = k1
        K_prev = K
        field_, params, c = self._field, self._params, self._c
        for _ in range(self.cfg.m):
            Y = pirk_stage_inputs(y, h, self._A, K)

            def evaluate(lo, hi, Y=Y):
                return [field_(t + c[i] * h, Y[i], params) for i in range(lo, hi)]

            K_prev = K
            K = np.vstack(self._executor.map_chunks(evaluate, s))
        return pirk_finish(y, h, self._b, K, K_prev)


def pirk_step(sys, t, y, h, cfg: Optional[PirkConfig] = None, executor: Optional[ProbeExecutor] = None) -> StepOutcome:
    """One PIRK step; ``rhs_evals`` is ``1 + m*s``.

    Pass an ``executor`` with several workers to evaluate the stages of each
    iteration level concurrently; the result is bitwise independent of it.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    cfg = PirkConfig() if cfg is None else cfg
    y = as_state(y, sys.dimension)
    if executor is None and cfg.workers > 1:
        with ProbeExecutor(cfg.workers) as ex:
            return Pirk(sys, cfg, ex).step(t, y, h)
    return Pirk(sys, cfg, executor).step(t, y, h)


def pirk_integrate(sys, t0, y0, t_end, tol, cfg: Optional[PirkConfig] = None, h0=None, h_min=None,
                   max_steps=10**8) -> Solution:
    cfg = PirkConfig() if cfg is None else cfg
    y0 = as_state(y0, sys.dimension)
    if cfg.workers > 1:
        with ProbeExecutor(cfg.workers) as ex:
            return adaptive_integrate(Pirk(sys, cfg, ex), t0, y0, t_end, tol, cfg.order,
                                      h0=h0, h_min=h_min, max_steps=max_steps)
    return adaptive_integrate(Pirk(sys, cfg), t0, y0, t_end, tol, cfg.order,
                              h0=h0, h_min=h_min, max_steps=max_steps)
