"""Tick series model, sign paths, time shifts and CSV ingestion.

Every estimator in the package works on :class:`TickSeries`: strictly
increasing timestamps (seconds, as floats) with strictly positive prices.
Instances are validated on construction and their arrays are read-only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Union

import numpy as np

from .errors import NonMonotoneTime, NonPositivePrice, ParseError, TooShort

TIME_FORMATS = ("ms", "s")


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TickSeries:
    """Timestamped prices of one instrument.

    Parameters
    ----------
    times : array_like
        Observation times in seconds, strictly increasing.
    prices : array_like
        Observed prices, all strictly positive, same length as ``times``.
    label : str
        Free-form instrument name.
    """

    times: np.ndarray
    prices: np.ndarray
    label: str = ""

    def __post_init__(self):
        times = _frozen(self.times, float)
        prices = _frozen(self.prices, float)
        if times.ndim != 1 or prices.ndim != 1:
            raise TooShort("times and prices must be one-dimensional")
        if len(times) != len(prices):
            raise TooShort(f"length mismatch: {len(times)} times, {len(prices)} prices")
        if len(times) < 2:
            raise TooShort(f"need at least 2 ticks, got {len(times)}")
        bad = np.flatnonzero(~np.isfinite(times))
        if bad.size:
            raise NonMonotoneTime(int(bad[0]), f"timestamp at index {bad[0]} is not finite")
        steps = np.flatnonzero(np.diff(times) <= 0)
        if steps.size:
            raise NonMonotoneTime(int(steps[0]) + 1)
        bad = np.flatnonzero(~(prices > 0) | ~np.isfinite(prices))
        if bad.size:
            raise NonPositivePrice(int(bad[0]))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "prices", prices)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    def between(self, lo: float, hi: float) -> np.ndarray:
        """Boolean mask of ticks inside the closed interval ``[lo, hi]``."""
        return (self.times >= lo) & (self.times <= hi)


def validate(times: Iterable[float], prices: Iterable[float], label: str = "") -> TickSeries:
    """Build a :class:`TickSeries`, raising on malformed input.

    Nothing is reordered or deduplicated: the first offending index is
    reported through :class:`NonMonotoneTime` or :class:`NonPositivePrice`.
    """
    return TickSeries(np.asarray(list(times), dtype=float), np.asarray(list(prices), dtype=float), label)


def log_returns(s: TickSeries) -> np.ndarray:
    """Tick-to-tick log returns, ``log(p[k+1] / p[k])``; length ``n - 1``."""
    return np.log(s.prices[1:] / s.prices[:-1])


@dataclass(frozen=True, eq=False)
class SignPath:
    """Signs of tick returns and their running sum.

    ``signs[k]`` is attached to ``times[k]``, the time of the later tick of
    the k-th return, so ``times`` is the source series' times from the
    second tick on.
    """

    times: np.ndarray
    signs: np.ndarray
    cum: np.ndarray

    def at(self, t: float, inclusive: bool = False) -> int:
        return eval_cum(self, t, inclusive=inclusive)


def sign_path(s: TickSeries) -> SignPath:
    r = log_returns(s)
    signs = np.sign(r).astype(np.int64)
    return SignPath(_frozen(s.times[1:], float), _frozen(signs, np.int64), _frozen(np.cumsum(signs), np.int64))


def eval_cum(path: SignPath, t: float, inclusive: bool = False) -> int:
    """Cumulative sign path at time ``t``.

    With ``inclusive=False`` (the default) a sign stamped exactly at ``t`` is
    not yet counted, i.e. the sum runs over ticks with ``u_k < t``. With
    ``inclusive=True`` it runs over ``u_k <= t``.
    """
    k = int(np.searchsorted(path.times, t, side="right" if inclusive else "left"))
    return int(path.cum[k - 1]) if k else 0


def shift(s: TickSeries, theta: float) -> TickSeries:
    """Translate every timestamp by ``theta`` seconds, keeping prices."""
    if theta == 0:
        return s
    # Shifts compose against the unshifted source so +a then -a is bit-exact.
    root, offset = getattr(s, "_shift_origin", (s, 0.0))
    total = offset + theta
    if total == 0:
        return root
    label = f"{root.label}{total:+g}s" if root.label else f"shift{total:+g}s"
    out = TickSeries(root.times + total, root.prices, label)
    object.__setattr__(out, "_shift_origin", (root, total))
    return out


def _parse_float(field: str, line: int, what: str) -> float:
    try:
        value = float(field)
    except ValueError:
        raise ParseError(line, f"{what} {field.strip()!r} is not a number") from None
    if not math.isfinite(value):
        raise ParseError(line, f"{what} {field.strip()!r} is not finite")
    return value


def read_ticks_csv(
    path: Union[str, PathLike],
    time_format: str = "ms",
    label: str | None = None,
) -> TickSeries:
    """Read a ``timestamp,price`` CSV into a validated :class:`TickSeries`.

    ``time_format`` is ``"ms"`` for integer epoch milliseconds (divided by
    1000 on ingestion) or ``"s"`` for decimal seconds. A single header row
    is allowed on the first line. Blank lines are skipped.
    """
    if time_format not in TIME_FORMATS:
        raise ValueError(f"time_format must be one of {TIME_FORMATS}, got {time_format!r}")
    times: list[float] = []
    prices: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 2:
                raise ParseError(line, f"expected 2 columns, got {len(row)}")
            if line == 1 and not times:
                try:
                    float(row[0])
                except ValueError:
                    continue  # header
            if time_format == "ms":
                try:
                    stamp = int(row[0])
                except ValueError:
                    raise ParseError(line, f"timestamp {row[0].strip()!r} is not integer milliseconds") from None
                t = stamp / 1000.0
            else:
                t = _parse_float(row[0], line, "timestamp")
            times.append(t)
            prices.append(_parse_float(row[1], line, "price"))
    if label is None:
        label = str(path)
    return validate(times, prices, label)


def write_ticks_csv(s: TickSeries, path: Union[str, PathLike], time_format: str = "s") -> None:
    """Write ``s`` in the tick CSV format (with header).

    Seconds are written with ``repr`` precision so that reading the file
    back with ``time_format="s"`` reproduces the series exactly.
    """
    if time_format not in TIME_FORMATS:
        raise ValueError(f"time_format must be one of {TIME_FORMATS}, got {time_format!r}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "price"])
        for t, p in zip(s.times.tolist(), s.prices.tolist()):
            stamp = str(int(round(t * 1000))) if time_format == "ms" else repr(t)
            w.writerow([stamp, repr(p)])
