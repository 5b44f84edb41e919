"""Command-line entry point: ``parode <subcommand> [flags]``.

Exit status is 0 on success, 2 for usage errors and 3 when an integration
aborts numerically.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

from . import bench
from .core import IntegrationError, StepFailure

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _common(p, method_default=None):
    p.add_argument("--method", choices=bench.METHODS, default=method_default, required=method_default is None)
    p.add_argument("--system", default="ho", help="ho, hh, hh-rep:k or heavy:d:cost")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--m", type=_positive(int), default=9, help="PIRK iterations")
    p.add_argument("--workers", type=_positive(int), default=None, help="physical threads")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.add_argument("--seed", type=int, default=None, help="accepted for reproducible scripting; runs are deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parode", description="Parallel ODE integration benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="one run, one CSV record")
    _common(p)
    p.add_argument("--tol", type=_positive(float))
    p.add_argument("--h", type=_positive(float))
    p.add_argument("--n-cpu", type=_positive(int), default=1)
    p.add_argument("--trajectory", default=None, help="also write the accepted states to this CSV")

    p = sub.add_parser("sweep-tol", help="corrections against tolerance 10^-T")
    _common(p, method_default="dop853-aspa")
    p.add_argument("--n-cpu", type=_positive(int), default=10)
    p.add_argument("--exponents", type=int, nargs="+", default=list(range(5, 16)), metavar="T")

    p = sub.add_parser("sweep-cpus", help="corrections against probe count")
    _common(p, method_default="dop853-aspa")
    p.add_argument("--tol", type=_positive(float), required=True)
    p.add_argument("--n-cpu", type=_positive(int), nargs="+", default=[1, 5, 10, 20], metavar="N")

    p = sub.add_parser("order", help="measured convergence order with fixed steps")
    _common(p)
    p.add_argument("--h", type=_positive(float), nargs="+", required=True, metavar="H")

    p = sub.add_parser("trace", help="per-iteration (n, h_n, m_n) trace of a probe-parallel run")
    _common(p, method_default="dop853-aspa")
    p.add_argument("--tol", type=_positive(float), required=True)
    p.add_argument("--n-cpu", type=_positive(int), default=10)
    return parser


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _run(args) -> None:
    if args.command == "integrate":
        result = bench.run_integrate(args.method, args.system, args.t_end, t0=args.t0, tol=args.tol, h=args.h,
                                     n_cpu=args.n_cpu, m=args.m, workers=args.workers)
        with _output(args.out) as fh:
            bench.write_records([result.record], fh)
        if args.trajectory:
            with open(args.trajectory, "w", newline="") as fh:
                bench.write_trajectory(result.solution, fh)
    elif args.command == "sweep-tol":
        records = bench.sweep_tolerance(args.method, args.system, args.t_end, n_cpu=args.n_cpu,
                                        exponents=args.exponents, t0=args.t0, m=args.m, workers=args.workers)
        with _output(args.out) as fh:
            bench.write_records(records, fh)
    elif args.command == "sweep-cpus":
        if args.method != "dop853-aspa":
            raise ValueError("sweep-cpus only applies to dop853-aspa")
        records = bench.sweep_cpus(args.system, args.t_end, args.tol, n_values=args.n_cpu, t0=args.t0,
                                   workers=args.workers)
        with _output(args.out) as fh:
            bench.write_records(records, fh)
    elif args.command == "order":
        res = bench.convergence_order(args.method, args.system, args.h, t_end=args.t_end, t0=args.t0, m=args.m)
        with _output(args.out) as fh:
            fh.write("h,error,saturated\n")
            for h, err, sat in res.rows():
                fh.write(f"{h!r},{err!r},{int(sat)}\n")
        print(f"slope={res.slope:.6f} points_used={res.used}", file=sys.stderr)
    elif args.command == "trace":
        if args.method != "dop853-aspa":
            raise ValueError("trace needs --method dop853-aspa")
        result = bench.run_integrate(args.method, args.system, args.t_end, t0=args.t0, tol=args.tol,
                                     n_cpu=args.n_cpu, workers=args.workers)
        with _output(args.out) as fh:
            bench.emit_stepsize_trace(result, fh)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        _run(args)
    except (IntegrationError, StepFailure) as exc:
        print(f"parode: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"parode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
