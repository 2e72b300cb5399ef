"""Reference lead-lag estimators: Hayashi-Yoshida, HRY contrast, Dobreva-Schaumburg.

All estimators use the same lag convention as :mod:`leadlag.naples`: a
positive lag means X leads Y.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ZeroResolution
from .naples import LagGrid, LagProfile
from .ticks import TickSeries

__all__ = [
    "ActivityGrid",
    "activity_grid",
    "ds_estimate",
    "ds_index",
    "hry_contrast",
    "hry_estimate",
    "hy_covariance",
    "overlap_pairs",
]


def overlap_pairs(s: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs ``(i, j)`` with ``(s_i, s_{i+1}] ∩ (t_j, t_{j+1}] != ∅``.

    Two-pointer style sweep, vectorized: at most ``n + m`` pairs overlap.
    """
    # (a, b] and (c, d] intersect iff a < d and c < b
    lo = np.searchsorted(t[1:], s[:-1], side="right")  # first j with t_{j+1} > s_i
    hi = np.searchsorted(t[:-1], s[1:], side="left")  # first j with t_j >= s_{i+1}
    counts = np.maximum(hi - lo, 0)
    i = np.repeat(np.arange(len(s) - 1), counts)
    start = np.repeat(lo - np.cumsum(counts) + counts, counts)
    j = start + np.arange(counts.sum())
    return i, j


def _hy(s: np.ndarray, dx: np.ndarray, t: np.ndarray, dy: np.ndarray) -> float:
    i, j = overlap_pairs(s, t)
    # fsum is correctly rounded, hence independent of summation order
    return math.fsum((dx[i] * dy[j]).tolist())


def hy_covariance(x: TickSeries, y: TickSeries) -> float:
    """Hayashi-Yoshida covariance of the log prices of ``x`` and ``y``.

    Sums ``dlogX_i * dlogY_j`` over all pairs of observation intervals
    that overlap. Exactly symmetric in its arguments.
    """
    dx = np.diff(np.log(x.prices))
    dy = np.diff(np.log(y.prices))
    return _hy(x.times, dx, y.times, dy)


def hry_contrast(x: TickSeries, y: TickSeries, lag: float) -> float:
    """Hoffmann-Rosenbaum-Yoshida contrast at ``lag``.

    Hayashi-Yoshida sum with X's observation grid moved forward by ``lag``
    (equivalently Y's grid moved back), so the contrast peaks in absolute
    value near the lag by which X leads Y. The grid that moves is always
    the one moving forward, so ``hry_contrast(x, y, a) == hry_contrast(y, x, -a)``
    holds bit for bit.
    """
    dx = np.diff(np.log(x.prices))
    dy = np.diff(np.log(y.prices))
    if lag >= 0:
        return _hy(x.times + lag, dx, y.times, dy)
    return _hy(x.times, dx, y.times - lag, dy)


def hry_estimate(x: TickSeries, y: TickSeries, grid: LagGrid) -> LagProfile:
    """Lag maximizing ``|hry_contrast|`` over ``grid``."""
    values = np.array([abs(hry_contrast(x, y, lag)) for lag in grid.lags])
    return LagProfile.from_values(grid.lags, values, "hry")


@dataclass(frozen=True, eq=False)
class ActivityGrid:
    """Per-slot trading activity of two assets on a common clock.

    Slot ``k`` covers ``[origin + k*resolution, origin + (k+1)*resolution)``.
    """

    resolution: float
    origin: float
    x_active: np.ndarray
    y_active: np.ndarray

    @property
    def slots(self) -> int:
        return len(self.x_active)


def activity_grid(x: TickSeries, y: TickSeries, resolution: float) -> ActivityGrid:
    if not resolution > 0:
        raise ZeroResolution(f"resolution must be positive, got {resolution}")
    origin = math.floor(min(x.start, y.start) / resolution) * resolution
    sx = np.floor((x.times - origin) / resolution).astype(np.int64)
    sy = np.floor((y.times - origin) / resolution).astype(np.int64)
    n = int(max(sx[-1], sy[-1])) + 1
    xa = np.zeros(n, dtype=bool)
    ya = np.zeros(n, dtype=bool)
    xa[sx] = True
    ya[sy] = True
    return ActivityGrid(float(resolution), float(origin), xa, ya)


def _ds_from_activity(g: ActivityGrid, shift: int) -> tuple[float, bool]:
    n = g.slots
    k = abs(shift)
    if k >= n:
        raise ValueError(f"slot shift {shift} out of range for {n} slots")
    i = np.arange(k, n - k)
    lead = g.y_active[i + shift]
    lag = g.x_active[i]
    den = min(int(lead.sum()), int(lag.sum()))
    if den == 0:
        return 0.0, True
    return int((lead & lag).sum()) / den, False


def ds_index(x: TickSeries, y: TickSeries, resolution: float, shift: int) -> float:
    """Dobreva-Schaumburg co-activity index at an integer slot shift.

    Counts slots ``i`` where X trades in slot ``i`` and Y trades in slot
    ``i + shift``, over ``|shift| <= i < N - |shift|``, normalized by the
    smaller of the two activity totals over the same range. A positive
    shift rewards Y trading after X. Returns 0 (with a RuntimeWarning) when
    either asset is inactive over the range.
    """
    g = activity_grid(x, y, resolution)
    value, empty = _ds_from_activity(g, int(shift))
    if empty:
        warnings.warn(f"no activity in range for slot shift {shift}; index set to 0", RuntimeWarning, stacklevel=2)
    return value


def ds_estimate(x: TickSeries, y: TickSeries, resolution: float, grid: LagGrid) -> LagProfile:
    """Lag maximizing the DS index over ``grid``.

    Lags are rounded to the nearest slot; ``meta["slot_shifts"]`` records
    the shifts used, ``meta["rounded"]`` whether any lag was off-grid and
    ``meta["empty_lags"]`` the lags whose denominator vanished.
    """
    g = activity_grid(x, y, resolution)
    shifts = np.rint(grid.lags / resolution).astype(np.int64)
    values = np.empty(len(shifts))
    empty = []
    for k, sh in enumerate(shifts):
        if abs(sh) >= g.slots:
            values[k] = 0.0
            empty.append(float(grid.lags[k]))
            continue
        values[k], was_empty = _ds_from_activity(g, int(sh))
        if was_empty:
            empty.append(float(grid.lags[k]))
    meta = {
        "resolution": float(resolution),
        "slot_shifts": shifts.tolist(),
        "rounded": bool(np.any(~np.isclose(shifts * resolution, grid.lags, rtol=0, atol=1e-9))),
        "empty_lags": empty,
    }
    return LagProfile.from_values(grid.lags, values, "ds", meta)
