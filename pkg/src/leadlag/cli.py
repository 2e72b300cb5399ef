"""Command-line interface.

Exit codes: 0 success, 1 user error (bad flags, unreadable or malformed
input), 2 internal error.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import json
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .baselines import ds_estimate, hry_estimate
from .errors import LeadLagError
from .harness import ESTIMATORS, ConvergenceConfig, run_convergence, run_oracle_suite
from .naples import LagGrid, naples_profile, rolling_estimate
from .serialize import (
    profile_to_dict,
    rolling_to_dict,
    write_curve_csv,
    write_profile_csv,
    write_records_csv,
    write_records_json,
    write_rolling_csv,
)
from .sim import GbmPairConfig, SamplingLaw, simulate_pair
from .theory import EquispacedModel, expected_curve
from .ticks import read_ticks_csv, write_ticks_csv

log = logging.getLogger("leadlag")


class UsageError(Exception):
    def __init__(self, message: str, parser: argparse.ArgumentParser):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid(text: str) -> LagGrid:
    try:
        return LagGrid.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("range needs step > 0 and stop >= start")
    return start, stop, step


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _shared(p: argparse.ArgumentParser, seed: bool = False) -> None:
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="unsigned 64-bit base seed")


def _pair_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x", required=True, help="tick CSV of the candidate leader")
    p.add_argument("--y", required=True, help="tick CSV of the candidate follower")
    p.add_argument("--time-format", choices=("ms", "s"), default="ms", help="timestamp unit in the tick files")
    p.add_argument("--grid", type=_grid, default=LagGrid.from_range(-100, 100, 1), help="lags as start:stop:step")
    p.add_argument("--method", choices=("naples", "hry", "ds"), default="naples")
    p.add_argument("--resolution", type=float, default=1.0, help="DS activity slot width (seconds)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leadlag", description="Lead-lag estimation for non-synchronous tick data.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a lead-lag GBM pair as two tick CSVs")
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX_x.csv and PREFIX_y.csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--theta", type=float, default=10.0)
    p.add_argument("--sigma1", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=100.0)
    p.add_argument("--y0", type=float, default=100.0)
    p.add_argument("--horizon", type=float, default=1e4)
    p.add_argument("--gap-mean", type=float, default=10.0)
    p.add_argument("--gap-sd", type=float, default=2.0)
    p.add_argument("--time-format", choices=("ms", "s"), default="ms", help="timestamp unit written (ms rounds to the millisecond)")

    p = sub.add_parser("estimate", help="estimate the lag; prints theta_hat")
    _pair_inputs(p)
    _shared(p)

    p = sub.add_parser("profile", help="write the full lag profile")
    _pair_inputs(p)
    _shared(p)

    p = sub.add_parser("rolling", help="lag estimates on sliding windows")
    _pair_inputs(p)
    p.add_argument("--window", type=float, required=True, help="window length (seconds)")
    p.add_argument("--step", type=float, required=True, help="distance between window ends (seconds)")
    _shared(p)

    p = sub.add_parser("bench-convergence", help="MAE of lag estimators versus horizon")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--horizons", type=_floats, default=None, help="comma-separated log10 horizons")
    p.add_argument("--estimators", default="naples,hry", help=f"comma-separated subset of {','.join(ESTIMATORS)}")
    p.add_argument("--grid", type=_grid, default=LagGrid.from_range(-100, 100, 1))
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--theta", type=float, default=10.0)
    p.add_argument("--gap-mean", type=float, default=10.0)
    p.add_argument("--gap-sd", type=float, default=2.0)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--sigma",
        type=float,
        default=None,
        help="volatility of both assets (default 1, or 0.01 with --full); lag estimates do not depend on it",
    )
    p.add_argument("--full", action="store_true", help="full sweep: 1000 trials, log10 T = 2.5, 2.6, ..., 5.0")
    _shared(p, seed=True)

    p = sub.add_parser("oracle", help="Monte Carlo mean of R(T) against the closed form")
    p.add_argument("--rho", type=_floats, default=[0.5, 0.9])
    p.add_argument("--theta", type=_floats, default=[0, -2.5, 2.5, -5, 5, -10, 10, -15, 15, -25, 25])
    p.add_argument("--delta", type=float, default=10.0)
    p.add_argument("--paths", type=int, default=2000)
    p.add_argument("--horizon", type=float, default=1e4)
    p.add_argument("--strict", action="store_true", help="use the strict tie convention in R")
    _shared(p, seed=True)

    p = sub.add_parser("expected", help="tabulate the closed-form E[R] curve")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--l", dest="scale", type=float, default=1.0, help="term count scale l")
    p.add_argument("--range", dest="span", type=_range, required=True, help="start:stop:step")
    _shared(p)
    return parser


def _load_pair(args):
    x = read_ticks_csv(args.x, args.time_format)
    y = read_ticks_csv(args.y, args.time_format)
    return x, y


def _profile(args, x, y):
    if args.method == "naples":
        return naples_profile(x, y, args.grid)
    if args.method == "hry":
        return hry_estimate(x, y, args.grid)
    return ds_estimate(x, y, args.resolution, args.grid)


def _write_profile(args, prof) -> None:
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(profile_to_dict(prof), fh, indent=2)
            fh.write("\n")
        else:
            write_profile_csv(prof, fh)


def _cmd_simulate(args) -> int:
    cfg = GbmPairConfig(
        x0=args.x0, y0=args.y0, sigma1=args.sigma1, sigma2=args.sigma2,
        rho=args.rho, theta=args.theta, horizon=args.horizon, seed=args.seed,
    )
    x, y = simulate_pair(cfg, SamplingLaw(args.gap_mean, args.gap_sd))
    write_ticks_csv(x, f"{args.out}_x.csv", args.time_format)
    write_ticks_csv(y, f"{args.out}_y.csv", args.time_format)
    print(f"wrote {args.out}_x.csv ({len(x)} ticks) and {args.out}_y.csv ({len(y)} ticks)")
    return 0


def _cmd_estimate(args) -> int:
    x, y = _load_pair(args)
    prof = _profile(args, x, y)
    if args.out is not None:
        _write_profile(args, prof)
    print(f"theta_hat={prof.best_lag!r}")
    print(f"value={prof.best_value!r}")
    print(f"theta_min={prof.worst_lag!r}")
    if prof.method == "naples":
        print(f"theta_mid={prof.midpoint_lag!r}")
    return 0


def _cmd_profile(args) -> int:
    x, y = _load_pair(args)
    _write_profile(args, _profile(args, x, y))
    return 0


def _cmd_rolling(args) -> int:
    x, y = _load_pair(args)
    if args.method == "naples":
        est = None
    elif args.method == "hry":
        est = hry_estimate
    else:
        def est(a, b, g):
            return ds_estimate(a, b, args.resolution, g)
    roll = rolling_estimate(x, y, args.grid, args.window, args.step, estimator=est)
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(rolling_to_dict(roll), fh, indent=2)
            fh.write("\n")
        else:
            write_rolling_csv(roll, fh)
    return 0


def _cmd_bench(args) -> int:
    estimators = tuple(e.strip() for e in args.estimators.split(",") if e.strip())
    if args.full:
        logs = np.round(np.arange(2.5, 5.0 + 1e-9, 0.1), 1)
        trials = 1000
    else:
        logs = np.array(args.horizons or [2.5, 3.0, 3.5, 4.0])
        trials = args.trials
    # at T = 1e5 a unit-volatility log price wanders past the float range of exp;
    # every estimator only sees return signs, log-increment ratios or tick times
    sigma = args.sigma if args.sigma is not None else (0.01 if args.full else 1.0)
    cfg = ConvergenceConfig(
        horizons=tuple(float(10**h) for h in logs),
        trials=trials,
        estimators=estimators,
        grid=args.grid,
        sim=GbmPairConfig(sigma1=sigma, sigma2=sigma, rho=args.rho, theta=args.theta),
        sampling=SamplingLaw(args.gap_mean, args.gap_sd),
        base_seed=args.seed,
        ds_resolution=args.resolution,
    )
    report = run_convergence(cfg, workers=args.workers)
    with _output(args.out) as fh:
        (write_records_csv if args.format == "csv" else write_records_json)(report.to_records(), fh)
    return 0


def _cmd_oracle(args) -> int:
    cells = run_oracle_suite(
        args.rho, args.theta, args.delta, args.paths, args.horizon, args.seed, inclusive=not args.strict
    )
    records = [dataclasses.asdict(c) for c in cells]
    with _output(args.out) as fh:
        (write_records_csv if args.format == "csv" else write_records_json)(records, fh)
    return 0


def _cmd_expected(args) -> int:
    start, stop, step = args.span
    points = expected_curve(EquispacedModel(args.rho, 0.0, args.delta, args.scale), start, stop, step)
    with _output(args.out) as fh:
        if args.format == "json":
            write_records_json([{"theta": a, "expected_r": b} for a, b in points], fh)
        else:
            write_curve_csv(points, fh)
    return 0


COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "profile": _cmd_profile,
    "rolling": _cmd_rolling,
    "bench-convergence": _cmd_bench,
    "oracle": _cmd_oracle,
    "expected": _cmd_expected,
}


_RANGE_FLAGS = ("--grid", "--range", "--theta", "--rho")


def _join_range_values(argv: Sequence[str]) -> list[str]:
    # argparse reads "-100:100:1" as an option; glue such values to their flag
    out: list[str] = []
    it = iter(argv)
    for arg in it:
        if arg in _RANGE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(arg)
            elif nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{arg}={nxt}")
            else:
                out.extend([arg, nxt])
        else:
            out.append(arg)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _join_range_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"leadlag: error: {exc}", file=sys.stderr)
        exc.parser.print_help(sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (LeadLagError, ValueError, OSError) as exc:
        print(f"leadlag {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
