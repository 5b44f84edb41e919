"""Step-size update rules: the classical error-per-step controller and the
probe-count recurrence used by the parallel stepsize search."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


def classical_next_step(h, epsilon, tol, p, safety=SAFETY, min_factor=MIN_FACTOR, max_factor=MAX_FACTOR):
    """h * safety * (tol / epsilon)**(1/p), clamped to [min_factor*h, max_factor*h].

    ``epsilon == 0`` maps to the upper clamp and a non-finite epsilon to the
    lower one.
    """
    if p < 1:
        raise ValueError("order p must be >= 1")
    if epsilon == 0.0:
        factor = max_factor
    elif not math.isfinite(epsilon):
        factor = min_factor
    else:
        factor = safety * (tol / epsilon) ** (1.0 / p)
        factor = min(max_factor, max(min_factor, factor))
    return h * factor


def aspa_ratio(m: int, n: int) -> float:
    """h_{n+1}/h_n = (2N-1)/(N+1)^2 * m + N/((2N-1)(N+1))."""
    if n < 1:
        raise ValueError("N must be >= 1")
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside [0, {n}]")
    return (2 * n - 1) / (n + 1) ** 2 * m + n / ((2 * n - 1) * (n + 1))


def aspa_ratio_exact(m: int, n: int) -> Fraction:
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside [0, {n}]")
    return Fraction(2 * n - 1, (n + 1) ** 2) * m + Fraction(n, (2 * n - 1) * (n + 1))


def aspa_next_step(h_n: float, m: int, n: int) -> float:
    return aspa_ratio(m, n) * h_n


def linear_ratio(m: int, n: int) -> float:
    """Undamped rule 2m/N + 1/(2N).

    Used for N < 3, where the damped recurrence shrinks h for every m and the
    search can never cover a finite interval.
    """
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside [0, {n}]")
    return 2.0 * m / n + 1.0 / (2 * n)


def growth_threshold(n: int) -> Fraction:
    """The m above which the damped recurrence grows h: (N+1)(2N^2-1)/(2N-1)^2."""
    return Fraction((n + 1) * (2 * n * n - 1), (2 * n - 1) ** 2)


def aspa_fixed_point_free(n: int) -> bool:
    """True iff no integer m in [0, N] solves m(2N-1)^2 + N(N+1) = (N+1)^2(2N-1).

    Pure integer arithmetic. Only defined for N >= 3.
    """
    if n < 3:
        raise ValueError("fixed-point freeness is only claimed for N >= 3")
    lhs_step = (2 * n - 1) ** 2
    rhs = (n + 1) ** 2 * (2 * n - 1) - n * (n + 1)
    return all(m * lhs_step != rhs for m in range(n + 1))


def select_m(errors: Sequence[float], tol: float) -> int:
    """Largest 1-based index whose error is <= tol, or 0 when none is."""
    m = 0
    for i, err in enumerate(errors, start=1):
        if err <= tol:
            m = i
    return m
