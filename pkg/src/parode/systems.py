"""Test problems: harmonic oscillator, Hénon-Heiles, replicated Hénon-Heiles,
and a synthetic chain with an artificially expensive right-hand side.

All fields are numba-compiled with ``nogil`` so steppers may evaluate them
from several threads at once.
"""

from __future__ import annotations

import functools
import math

import numba
import numpy as np

from .core import OdeSystem

_JIT = dict(nogil=True, cache=True)


@numba.njit(**_JIT)
def _ho_field(t, y, params):
    out = np.empty(2)
    out[0] = y[1]
    out[1] = -y[0]
    return out


def _ho_exact(t):
    return np.array([math.sin(t), math.cos(t)])


def _ho_energy(y):
    return 0.5 * (y[0] * y[0] + y[1] * y[1])


@functools.cache
def harmonic_oscillator() -> OdeSystem:
    return OdeSystem(
        name="ho", dimension=2, field=_ho_field, y0=np.array([0.0, 1.0]),
        analytic_solution=_ho_exact, invariant_fn=_ho_energy,
    )


@numba.njit(**_JIT)
def _hh_blocks(t, y, params):
    out = np.empty_like(y)
    for b in range(y.shape[0] // 4):
        i = 4 * b
        x, px, q, pq = y[i], y[i + 1], y[i + 2], y[i + 3]
        out[i] = px
        out[i + 1] = -x - 2.0 * x * q
        out[i + 2] = pq
        out[i + 3] = -q - x * x + q * q
    return out


def hh_hamiltonian(y) -> float:
    """H = (y2² + y4²)/2 + (y1² + y3²)/2 + y1² y3 - y3³/3."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (4,):
        raise ValueError(f"Hénon-Heiles state must have dimension 4, got {y.shape}")
    x, px, q, pq = y
    return 0.5 * (px * px + pq * pq) + 0.5 * (x * x + q * q) + x * x * q - q ** 3 / 3.0


def block_hamiltonians(y) -> np.ndarray:
    """Per-block energies of a replicated Hénon-Heiles state (dimension 4k)."""
    blocks = np.asarray(y, dtype=np.float64).reshape(-1, 4)
    x, px, q, pq = blocks.T
    return 0.5 * (px * px + pq * pq) + 0.5 * (x * x + q * q) + x * x * q - q ** 3 / 3.0


# simplest state on the H = 1/6 energy shell
HH_Y0 = np.array([0.0, math.sqrt(1.0 / 3.0), 0.0, 0.0])


@functools.cache
def henon_heiles() -> OdeSystem:
    return OdeSystem(name="hh", dimension=4, field=_hh_blocks, y0=HH_Y0, invariant_fn=hh_hamiltonian)


def _replicated_energy(y):
    return float(np.sum(block_hamiltonians(y)))


@functools.cache
def replicated_henon_heiles(k: int) -> OdeSystem:
    if k < 1:
        raise ValueError("need at least one block")
    return OdeSystem(
        name=f"hh-rep:{k}", dimension=4 * k, field=_hh_blocks, y0=np.tile(HH_Y0, k),
        invariant_fn=_replicated_energy,
    )


@numba.njit(**_JIT)
def burn(units):
    """Deterministic busy work: ``units`` sine evaluations."""
    x = 0.5
    for _ in range(units):
        x = math.sin(x) + 0.5
    return x


@numba.njit(**_JIT)
def _chain_field(t, y, params):
    # params = (beta, cost); state = (q_1..q_n, p_1..p_n), fixed walls at both ends
    n = y.shape[0] // 2
    beta = params[0]
    out = np.empty_like(y)
    for i in range(n):
        left = y[i - 1] if i > 0 else 0.0
        right = y[i + 1] if i < n - 1 else 0.0
        dl = y[i] - left
        dr = right - y[i]
        out[i] = y[n + i]
        out[n + i] = (dr - dl) + beta * (dr * dr * dr - dl * dl * dl)
    pad = burn(int(params[1]))
    # adds +0.0; keeps the padding loop live without changing the result
    out[0] += 0.0 * pad
    return out


def chain_energy(y, beta):
    y = np.asarray(y, dtype=np.float64)
    n = y.size // 2
    q = np.concatenate(([0.0], y[:n], [0.0]))
    dq = np.diff(q)
    return float(0.5 * np.sum(y[n:] ** 2) + np.sum(0.5 * dq ** 2 + 0.25 * beta * dq ** 4))


@functools.cache
def synthetic_heavy(d: int, cost: int, beta: float = 0.25) -> OdeSystem:
    """Anharmonic chain of d/2 masses between fixed walls; cubic nearest-neighbour coupling.

    Every evaluation additionally burns ``cost`` sine evaluations. The chain
    conserves its energy, so solutions stay bounded.
    """
    if d < 2 or d % 2:
        raise ValueError("synthetic_heavy needs an even dimension >= 2")
    if cost < 0:
        raise ValueError("cost must be nonnegative")
    n = d // 2
    q0 = 0.5 * np.sin(np.pi * np.arange(1, n + 1) / (n + 1))
    y0 = np.concatenate((q0, np.zeros(n)))
    return OdeSystem(
        name=f"heavy:{d}:{cost}", dimension=d, field=_chain_field, y0=y0,
        params=np.array([beta, float(cost)]),
        invariant_fn=functools.partial(chain_energy, beta=beta), rhs_cost_padding=cost,
    )


def get_system(spec: str) -> OdeSystem:
    """Resolve ``ho``, ``hh``, ``hh-rep:k`` or ``heavy:d:cost``."""
    parts = spec.split(":")
    try:
        if parts == ["ho"]:
            return harmonic_oscillator()
        if parts == ["hh"]:
            return henon_heiles()
        if parts[0] == "hh-rep" and len(parts) == 2:
            return replicated_henon_heiles(int(parts[1]))
        if parts[0] == "heavy" and len(parts) == 3:
            return synthetic_heavy(int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad system spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown system {spec!r} (expected ho, hh, hh-rep:k, heavy:d:cost)")
