"""CSV/JSON writers and readers for profiles, rolling estimates, curves and reports.

Floats are written with ``repr`` so every file reads back to identical values.
"""

from __future__ import annotations

import csv
import json
import math
from typing import IO, Iterable

import numpy as np

from .naples import LagProfile, RollingEstimate

PROFILE_HEADER = ["theta", "value"]
ROLLING_HEADER = ["window_end", "theta_hat", "value"]
CURVE_HEADER = ["theta", "expected_r"]


def _num(v) -> str:
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def _read(fh: IO[str], header: list[str]) -> list[list[str]]:
    rows = list(csv.reader(fh))
    if not rows or rows[0] != header:
        raise ValueError(f"expected header {','.join(header)}")
    return rows[1:]


def _parse(field: str) -> float:
    return math.nan if field == "" else float(field)


def write_profile_csv(p: LagProfile, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(PROFILE_HEADER)
    for lag, val in zip(p.lags, p.values):
        w.writerow([_num(lag), _num(val)])


def read_profile_csv(fh: IO[str], method: str = "naples") -> LagProfile:
    rows = _read(fh, PROFILE_HEADER)
    lags = [float(r[0]) for r in rows]
    values = [float(r[1]) for r in rows]
    return LagProfile.from_values(lags, values, method)


def profile_to_dict(p: LagProfile) -> dict:
    d = {
        "method": p.method,
        "best_lag": p.best_lag,
        "best_value": p.best_value,
        "worst_lag": p.worst_lag,
        "lags": p.lags.tolist(),
        "values": p.values.tolist(),
    }
    if p.method == "naples":
        d["midpoint_lag"] = p.midpoint_lag
    if p.meta:
        d["meta"] = p.meta
    return d


def write_rolling_csv(r: RollingEstimate, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(ROLLING_HEADER)
    for e, lag, val in zip(r.window_ends, r.lags_hat, r.values):
        w.writerow([_num(e), _num(lag), _num(val)])


def read_rolling_csv(fh: IO[str], window_length: float = math.nan, step: float = math.nan) -> RollingEstimate:
    rows = _read(fh, ROLLING_HEADER)
    cols = np.array([[_parse(f) for f in r] for r in rows], dtype=float).reshape(-1, 3)
    return RollingEstimate(cols[:, 0], cols[:, 1], cols[:, 2], window_length, step)


def rolling_to_dict(r: RollingEstimate) -> dict:
    def clean(a):
        return [None if math.isnan(v) else float(v) for v in a]

    return {
        "window_length": r.window_length,
        "step": r.step,
        "window_ends": r.window_ends.tolist(),
        "theta_hat": clean(r.lags_hat),
        "value": clean(r.values),
    }


def write_curve_csv(points: Iterable[tuple[float, float]], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for theta, er in points:
        w.writerow([_num(theta), _num(er)])


def read_curve_csv(fh: IO[str]) -> list[tuple[float, float]]:
    return [(float(a), float(b)) for a, b in _read(fh, CURVE_HEADER)]


def write_records_json(records: list[dict], fh: IO[str]) -> None:
    json.dump(records, fh, indent=2)
    fh.write("\n")


def write_records_csv(records: list[dict], fh: IO[str]) -> None:
    if not records:
        return
    w = csv.DictWriter(fh, fieldnames=list(records[0]), lineterminator="\n")
    w.writeheader()
    for rec in records:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in rec.items()})
