"""Shared building blocks: states, vector fields, tableaux, error norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# field(t, y, params) -> dy/dt; params is a float64 array of system constants
Field = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


class StepFailure(ArithmeticError):
    """A step produced non-finite values; the caller must retry with a smaller h."""

    def __init__(self, t, message="non-finite value in step", rhs_evals=0):
        super().__init__(f"{message} at t={t!r}")
        self.t = t
        self.rhs_evals = rhs_evals


class IntegrationError(RuntimeError):
    """An integration run aborted. ``stats`` holds the counters accumulated so far."""

    def __init__(self, message, stats=None, t=None):
        super().__init__(message)
        self.stats = stats
        self.t = t


class StepSizeUnderflow(IntegrationError):
    pass


class MaxStepsExceeded(IntegrationError):
    pass


def as_state(y, dimension: Optional[int] = None) -> np.ndarray:
    """Return ``y`` as a fresh, finite, 1-D float64 array."""
    arr = np.array(y, dtype=np.float64).reshape(-1)
    if arr.size < 1:
        raise ValueError("state must have at least one component")
    if dimension is not None and arr.size != dimension:
        raise ValueError(f"state has dimension {arr.size}, expected {dimension}")
    if not np.isfinite(arr).all():
        raise ValueError("state contains non-finite components")
    return arr


_EMPTY_PARAMS = np.empty(0, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class OdeSystem:
    """A named vector field dy/dt = field(t, y, params).

    ``field`` may be a plain Python callable or a numba-compiled function; in
    the latter case the steppers run their compiled kernels without the GIL,
    which is what lets probes and stages execute concurrently on threads.
    """

    name: str
    dimension: int
    field: Field
    y0: np.ndarray
    params: np.ndarray = field(default_factory=lambda: _EMPTY_PARAMS)
    analytic_solution: Optional[Callable[[float], np.ndarray]] = None
    invariant_fn: Optional[Callable[[np.ndarray], float]] = None
    rhs_cost_padding: int = 0
    t0: float = 0.0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.rhs_cost_padding < 0:
            raise ValueError("rhs_cost_padding must be nonnegative")
        object.__setattr__(self, "y0", as_state(self.y0, self.dimension))
        params = np.ascontiguousarray(self.params, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "params", params)
        self.y0.setflags(write=False)
        params.setflags(write=False)

    @classmethod
    def from_rhs(cls, name, rhs: Callable[[float, np.ndarray], np.ndarray], y0, **kwargs):
        """Build a system from an ordinary ``rhs(t, y)`` callable."""
        y0 = as_state(y0)
        def field(t, y, params):
            return np.asarray(rhs(t, y), dtype=np.float64)

        return cls(name=name, dimension=y0.size, field=field, y0=y0, **kwargs)

    @property
    def compiled(self) -> bool:
        return is_compiled(self.field)

    def rhs(self, t, y) -> np.ndarray:
        out = np.asarray(self.field(float(t), np.asarray(y, dtype=np.float64), self.params))
        if out.shape != (self.dimension,):
            raise ValueError(f"rhs returned shape {out.shape}, expected ({self.dimension},)")
        return out

    def invariant(self, y) -> float:
        if self.invariant_fn is None:
            raise ValueError(f"system {self.name!r} has no conserved quantity")
        return float(self.invariant_fn(np.asarray(y, dtype=np.float64)))


def is_compiled(fn) -> bool:
    try:
        from numba.core.registry import CPUDispatcher
    except ImportError:  # pragma: no cover
        return False
    return isinstance(fn, CPUDispatcher)


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    p0: int
    name: str = ""

    def __post_init__(self):
        A = np.array(self.A, dtype=np.float64)
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        c = np.array(self.c, dtype=np.float64).reshape(-1)
        s = b.size
        if A.shape != (s, s) or c.size != s:
            raise ValueError(f"inconsistent tableau shapes A{A.shape}, b({s},), c({c.size},)")
        for arr in (A, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def s(self) -> int:
        return self.b.size

    @property
    def is_explicit(self) -> bool:
        return not np.triu(self.A).any()


@dataclass(frozen=True)
class StepOutcome:
    y_next: np.ndarray
    epsilon: float
    rhs_evals: int


def error_norm(y, y_bar) -> float:
    """Componentwise max |y_i - y_bar_i|."""
    y = np.asarray(y, dtype=np.float64)
    y_bar = np.asarray(y_bar, dtype=np.float64)
    if y.shape != y_bar.shape:
        raise ValueError(f"dimension mismatch: {y.shape} vs {y_bar.shape}")
    if y.size == 0:
        return 0.0
    return float(np.max(np.abs(y - y_bar)))


def scaled_error_norm(y, y_bar, atol, rtol) -> float:
    """Max norm of the difference weighted by ``atol + rtol * max(|y|, |y_bar|)``.

    Opt-in alternative to :func:`error_norm`; a value <= 1 means "within tolerance".
    """
    y = np.asarray(y, dtype=np.float64)
    y_bar = np.asarray(y_bar, dtype=np.float64)
    if y.shape != y_bar.shape:
        raise ValueError(f"dimension mismatch: {y.shape} vs {y_bar.shape}")
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_bar))
    return float(np.max(np.abs(y - y_bar) / scale))


@dataclass
class TableauReport:
    violations: list[str]
    max_residual: float

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_tableau(t: ButcherTableau, tol: float = 1e-12, order: Optional[int] = None) -> TableauReport:
    """Check row sums, weight sum and the quadrature conditions B(k), k = 1..order.

    Sums use ``math.fsum`` so the residuals reflect the coefficients, not the
    summation order.
    """
    order = t.p0 if order is None else order
    violations = []
    worst = 0.0

    def check(label, residual):
        nonlocal worst
        worst = max(worst, residual)
        if not residual <= tol:
            violations.append(f"{label} (residual {residual:.3e})")

    for i in range(t.s):
        check(f"row {i + 1}: c != sum(a)", abs(math.fsum(t.A[i]) - t.c[i]))
    if t.is_explicit:
        check("c1 != 0", abs(t.c[0]))
    check("Σb ≠ 1", abs(math.fsum(t.b) - 1.0))
    for k in range(2, order + 1):
        q = math.fsum(float(bi) * float(ci) ** (k - 1) for bi, ci in zip(t.b, t.c))
        check(f"B({k}): Σ b c^{k - 1} != 1/{k}", abs(q - 1.0 / k))
    return TableauReport(violations, worst)
