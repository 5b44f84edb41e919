"""Benchmark harness behind the command line: single runs, sweeps over
tolerance and probe count, measured convergence order, and CSV emission."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .aspa import AspaConfig, AspaStats, aspa_integrate
from .core import OdeSystem
from .integrators import Dop853, Pirk, PirkConfig, Rk4, Solution, adaptive_integrate, fixed_step_integrate
from .parallel import ProbeExecutor
from .systems import burn, get_system

METHODS = ("rk4", "dop853", "pirk10", "dop853-aspa")
RUN_HEADER = ["method", "system", "tol", "h", "n_cpu", "corrections", "accepted", "rhs_evals", "wall_ms", "final_error"]
TRACE_HEADER = ["n", "h_n", "m_n"]
# global errors below this are roundoff, not truncation
SATURATION_FLOOR = 1e-14


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass(frozen=True)
class RunRecord:
    method: str
    system: str
    tol: Optional[float]
    h: Optional[float]
    n_cpu: int
    t0: float
    t_end: float
    corrections: int
    accepted_steps: int
    rhs_evals: int
    wall_time: float
    final_error: Optional[float]

    def row(self) -> list[str]:
        return [
            self.method, self.system, _fmt(self.tol), _fmt(self.h), str(self.n_cpu),
            str(self.corrections), str(self.accepted_steps), str(self.rhs_evals),
            f"{self.wall_time * 1e3:.3f}", _fmt(self.final_error),
        ]


@dataclass
class RunResult:
    record: RunRecord
    solution: Solution


def final_error(system: OdeSystem, sol: Solution) -> Optional[float]:
    """Error at the last output time: against the analytic solution when the
    system has one, else the drift of its conserved quantity, else None."""
    if system.analytic_solution is not None:
        exact = np.asarray(system.analytic_solution(sol.t_final), dtype=np.float64)
        return float(np.max(np.abs(sol.y_final - exact)))
    if system.invariant_fn is not None:
        return float(abs(system.invariant(sol.y_final) - system.invariant(sol.y[0])))
    return None


def _resolve(system) -> OdeSystem:
    return get_system(system) if isinstance(system, str) else system


def run_integrate(method: str, system, t_end: float, *, t0: float = 0.0, tol: Optional[float] = None,
                  h: Optional[float] = None, n_cpu: int = 1, m: int = 9, workers: Optional[int] = None,
                  executor=None) -> RunResult:
    """Run one integration and summarize it.

    ``rk4`` needs ``h``. ``dop853`` and ``pirk10`` are adaptive with ``tol``,
    or fixed-step when only ``h`` is given. ``dop853-aspa`` needs ``tol`` and
    uses ``n_cpu`` probes.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r} (expected one of {', '.join(METHODS)})")
    sys = _resolve(system)
    if t_end < t0:
        raise ValueError("t_end must not precede t0")
    if tol is not None and not tol > 0:
        raise ValueError("tol must be positive")
    if h is not None and not h > 0:
        raise ValueError("h must be positive")
    if n_cpu < 1:
        raise ValueError("n_cpu must be >= 1")

    y0 = sys.y0
    start = time.perf_counter()
    if method == "rk4":
        if h is None:
            raise ValueError("rk4 needs a fixed step --h")
        sol = fixed_step_integrate(Rk4(sys), t0, y0, t_end, h)
        n_cpu = 1
    elif method == "dop853":
        stepper = Dop853(sys)
        n_cpu = 1
        sol = _adaptive_or_fixed(stepper, t0, y0, t_end, tol, h)
    elif method == "pirk10":
        cfg = PirkConfig(m=m, workers=workers or 1)
        n_cpu = cfg.workers
        if executor is None and cfg.workers > 1:
            with ProbeExecutor(cfg.workers) as ex:
                sol = _adaptive_or_fixed(Pirk(sys, cfg, ex), t0, y0, t_end, tol, h)
        else:
            sol = _adaptive_or_fixed(Pirk(sys, cfg, executor), t0, y0, t_end, tol, h)
    else:
        if tol is None:
            raise ValueError("dop853-aspa needs --tol")
        sol = aspa_integrate(sys, t0, y0, t_end, AspaConfig(n_cpu, tol, workers=workers), executor=executor)
    wall = time.perf_counter() - start

    stats = sol.stats
    record = RunRecord(
        method=method, system=sys.name, tol=tol, h=h if method != "dop853-aspa" else None,
        n_cpu=n_cpu, t0=float(t0), t_end=float(t_end), corrections=stats.corrections,
        accepted_steps=stats.accepted_steps, rhs_evals=stats.rhs_evals, wall_time=wall,
        final_error=final_error(sys, sol),
    )
    return RunResult(record, sol)


def _adaptive_or_fixed(stepper, t0, y0, t_end, tol, h):
    if tol is not None:
        return adaptive_integrate(stepper, t0, y0, t_end, tol, stepper.order, h0=h)
    if h is None:
        raise ValueError(f"{stepper.name} needs --tol (adaptive) or --h (fixed step)")
    return fixed_step_integrate(stepper, t0, y0, t_end, h)


def sweep_tolerance(method: str, system, t_end: float, n_cpu: int = 1,
                    exponents: Iterable[int] = range(5, 16), **kwargs) -> list[RunRecord]:
    """One run per tolerance 10**-T."""
    return [run_integrate(method, system, t_end, tol=10.0 ** -T, n_cpu=n_cpu, **kwargs).record
            for T in exponents]


def sweep_cpus(system, t_end: float, tol: float, n_values: Iterable[int] = (1, 5, 10, 20),
               **kwargs) -> list[RunRecord]:
    """Serial DOP853 baseline row followed by one ASPA row per probe count."""
    rows = [run_integrate("dop853", system, t_end, tol=tol, **kwargs).record]
    for n in n_values:
        if not 1 <= n <= 64:
            raise ValueError(f"probe count {n} outside [1, 64]")
        rows.append(run_integrate("dop853-aspa", system, t_end, tol=tol, n_cpu=n, **kwargs).record)
    return rows


@dataclass(frozen=True)
class OrderResult:
    slope: float
    h_values: tuple
    errors: tuple
    used: int
    saturated: tuple

    def rows(self):
        sat = set(self.saturated)
        return [(h, e, h in sat) for h, e in zip(self.h_values, self.errors)]


def convergence_order(method: str, system, h_list: Sequence[float], t_end: float = 10.0,
                      t0: float = 0.0, m: int = 9) -> OrderResult:
    """Least-squares slope of log(global error at t_end) against log(h), fixed steps.

    Points whose error is under the roundoff floor are reported as saturated
    and left out of the fit.
    """
    sys = _resolve(system)
    if sys.analytic_solution is None:
        raise ValueError(f"system {sys.name!r} has no analytic solution")
    hs = [float(h) for h in h_list]
    if len(hs) < 3:
        raise ValueError("need at least 3 step sizes")
    for a, b in zip(hs, hs[1:]):
        if not math.isclose(b, a / 2, rel_tol=1e-12):
            raise ValueError("step sizes must halve successively")
    if method == "rk4":
        stepper = Rk4(sys)
    elif method == "dop853":
        stepper = Dop853(sys)
    elif method == "pirk10":
        stepper = Pirk(sys, PirkConfig(m=m))
    else:
        raise ValueError(f"order measurement needs a fixed-step method, not {method!r}")
    exact = np.asarray(sys.analytic_solution(t_end), dtype=np.float64)
    errors = []
    for h in hs:
        sol = fixed_step_integrate(stepper, t0, sys.y0, t_end, h)
        errors.append(float(np.max(np.abs(sol.y_final - exact))))
    keep = [(h, e) for h, e in zip(hs, errors) if e >= SATURATION_FLOOR]
    saturated = tuple(h for h, e in zip(hs, errors) if e < SATURATION_FLOOR)
    if len(keep) < 2:
        raise ValueError(f"only {len(keep)} unsaturated point(s); use larger steps or a longer horizon")
    x = np.log([h for h, _ in keep])
    y = np.log([e for _, e in keep])
    slope = float(np.polyfit(x, y, 1)[0])
    return OrderResult(slope, tuple(hs), tuple(errors), len(keep), saturated)


def write_records(records: Iterable[RunRecord], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RUN_HEADER)
    for r in records:
        w.writerow(r.row())


def write_trajectory(sol: Solution, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    d = sol.y.shape[1] if sol.y.ndim == 2 else 0
    w.writerow(["t"] + [f"y{i}" for i in range(d)])
    for t, y in zip(sol.t, sol.y):
        w.writerow([repr(float(t))] + [repr(float(v)) for v in y])


def emit_stepsize_trace(run, fh: TextIO) -> int:
    """Write the (n, h_n, m_n) trace of an ASPA run; returns the row count."""
    stats = getattr(run, "solution", run)
    stats = getattr(stats, "stats", stats)
    if not isinstance(stats, AspaStats):
        raise ValueError("a stepsize trace needs a dop853-aspa run")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    rows = stats.trace_rows()
    for n, h, m in rows:
        w.writerow([n, repr(float(h)), "" if m is None else m])
    return len(rows)


def rhs_seconds(system: OdeSystem, repeats: int = 200) -> float:
    """Median wall time of one right-hand-side evaluation."""
    y = system.y0
    system.rhs(system.t0, y)  # compile / warm up
    samples = []
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(repeats):
            system.field(0.0, y, system.params)
        samples.append((time.perf_counter() - start) / repeats)
    return float(np.median(samples))


def calibrate_cost(target_seconds: float, units: int = 200_000) -> int:
    """Padding units that make one padded evaluation take about ``target_seconds``."""
    burn(10)
    start = time.perf_counter()
    burn(units)
    per_unit = (time.perf_counter() - start) / units
    return max(1, math.ceil(target_seconds / per_unit))
