"""Classical fourth-order Runge-Kutta, fixed step, no error control."""

from __future__ import annotations

import numpy as np

from ..core import StepFailure, StepOutcome, as_state
from ._kernels import specialize
from .base import Solution, Stepper, fixed_step_integrate


class Rk4(Stepper):
    name = "rk4"
    order = 4
    embedded = False

    def __init__(self, system):
        super().__init__(system)
        self._kernel = specialize("rk4", self._field, system.compiled)

    def step(self, t, y, h, k1=None) -> StepOutcome:
        y_next = self._kernel(self._params, float(t), y, float(h))
        if not np.isfinite(y_next).all():
            raise StepFailure(t, rhs_evals=4)
        return StepOutcome(y_next, 0.0, 4)


def rk4_step(sys, t, y, h) -> StepOutcome:
    if not h > 0:
        raise ValueError("h must be positive")
    return Rk4(sys).step(t, as_state(y, sys.dimension), h)


def rk4_integrate(sys, t0, y0, t_end, h) -> Solution:
    return fixed_step_integrate(Rk4(sys), t0, as_state(y0, sys.dimension), t_end, h)
