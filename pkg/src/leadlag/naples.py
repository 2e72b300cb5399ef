"""NAPLES lead-lag index, lag profiles and rolling estimation.

The index trades the sign path of one asset on the return signs of the
other and antisymmetrizes the two directions::

    R(t) = sum_i  bX(s_i) * (Yhat(s_{i+1}) - Yhat(s_i)) * 1{s_{i+1} < t}
         - sum_j  bY(t_j) * (Xhat(t_{j+1}) - Xhat(t_j)) * 1{t_{j+1} < t}

where ``bZ`` is the sign of the tick log return and ``Zhat`` the running
sum of those signs. All terms are integers, so R is accumulated in int64
and is exactly antisymmetric in its two arguments.

Lag convention: a positive lag means X leads Y. The profile value at lag
``theta`` is R between X and the process ``Y(t + theta)``, i.e. Y's clock
moved back by ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import WindowTooShort
from .ticks import TickSeries, shift

__all__ = [
    "LagGrid",
    "LagProfile",
    "RollingEstimate",
    "argmax_lag",
    "estimate_lag",
    "naples_profile",
    "naples_r",
    "rolling_estimate",
]


@dataclass(frozen=True, eq=False)
class LagGrid:
    """Finite, strictly increasing set of candidate lags (seconds)."""

    lags: np.ndarray

    def __post_init__(self):
        lags = np.array(self.lags, dtype=float).reshape(-1)
        if lags.size == 0:
            raise ValueError("lag grid must not be empty")
        if not np.all(np.isfinite(lags)):
            raise ValueError("lag grid must be finite")
        if np.any(np.diff(lags) <= 0):
            raise ValueError("lag grid must be strictly increasing")
        lags.setflags(write=False)
        object.__setattr__(self, "lags", lags)

    def __len__(self) -> int:
        return len(self.lags)

    @classmethod
    def from_range(cls, start: float, stop: float, step: float) -> "LagGrid":
        """``start, start+step, ...`` up to ``stop``, inclusive when step divides the range."""
        if step <= 0:
            raise ValueError("step must be positive")
        if stop < start:
            raise ValueError("stop must not be below start")
        n = int(math.floor((stop - start) / step + 1e-9))
        return cls(start + step * np.arange(n + 1))

    @classmethod
    def parse(cls, text: str) -> "LagGrid":
        """Parse ``"start:stop:step"`` (e.g. ``"-100:100:1"``)."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ValueError(f"grid must look like start:stop:step, got {text!r}") from None
        return cls.from_range(start, stop, step)


def _pick(lags: np.ndarray, values: np.ndarray, best: float) -> int:
    # among lags hitting `best`: smallest |theta|, then smaller theta
    cand = np.flatnonzero(values == best)
    order = np.lexsort((lags[cand], np.abs(lags[cand])))
    return int(cand[order[0]])


def argmax_lag(lags, values) -> int:
    """Index of the maximal value; ties go to smallest ``|lag|``, then smaller lag."""
    lags = np.asarray(lags, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.isnan(values).all():
        raise ValueError("profile has no finite value")
    return _pick(lags, values, np.nanmax(values))


def argmin_lag(lags, values) -> int:
    lags = np.asarray(lags, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.isnan(values).all():
        raise ValueError("profile has no finite value")
    return _pick(lags, values, np.nanmin(values))


@dataclass(frozen=True, eq=False)
class LagProfile:
    """Contrast value per candidate lag plus the selected lag.

    ``method`` is one of ``"naples"``, ``"hry"`` or ``"ds"``. ``meta`` holds
    estimator-specific notes (e.g. slot rounding for the DS index).
    """

    lags: np.ndarray
    values: np.ndarray
    best_lag: float
    best_value: float
    method: str
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, lags, values, method: str, meta: Optional[dict] = None) -> "LagProfile":
        lags = np.array(lags, dtype=float)
        values = np.array(values, dtype=float)
        if lags.shape != values.shape or lags.ndim != 1 or lags.size == 0:
            raise ValueError("lags and values must be non-empty 1-d arrays of equal length")
        k = argmax_lag(lags, values)
        lags.setflags(write=False)
        values.setflags(write=False)
        return cls(lags, values, float(lags[k]), float(values[k]), method, dict(meta or {}))

    @property
    def worst_lag(self) -> float:
        """Minimizing lag (same tie rule); flags negatively correlated lead-lag."""
        return float(self.lags[argmin_lag(self.lags, self.values)])

    @property
    def midpoint_lag(self) -> float:
        """Midpoint of the maximizing and minimizing lags.

        The NAPLES profile is odd around the true lag with its extremes about
        one tick interval to either side, so the midpoint removes the offset
        the plain argmax carries. Informational; ``best_lag`` is the estimate.
        """
        return 0.5 * (self.best_lag + self.worst_lag)


def estimate_lag(profile: LagProfile) -> float:
    """The selected lag of ``profile``: max value, then smallest ``|lag|``, then smaller lag."""
    return float(profile.lags[argmax_lag(profile.lags, profile.values)])


def _count_before(a: np.ndarray, b: np.ndarray, inclusive: bool) -> np.ndarray:
    """For each ``b[k]`` the number of ``a`` elements ``< b[k]`` (``<=`` if inclusive).

    Both inputs are sorted; a stable sort of their concatenation is a
    single linear merge of two runs.
    """
    na = len(a)
    if inclusive:
        merged = np.concatenate([a, b])
        from_a = np.argsort(merged, kind="stable") < na
    else:
        merged = np.concatenate([b, a])
        from_a = np.argsort(merged, kind="stable") >= len(b)
    a_seen = np.cumsum(from_a)
    return a_seen[~from_a]


def _signs(prices: np.ndarray) -> np.ndarray:
    return np.sign(np.log(prices[1:] / prices[:-1])).astype(np.int64)


def _one_side(s: np.ndarray, bs: np.ndarray, u: np.ndarray, bu: np.ndarray, t: float, inclusive: bool) -> int:
    # sum_i b_s(s_i) * (Uhat(s_{i+1}) - Uhat(s_i)) * 1{s_{i+1} < t}; the first tick has no sign
    if len(s) < 3:
        return 0
    cum_u = np.concatenate([[0], np.cumsum(bu)])
    hat = cum_u[_count_before(u[1:], s, inclusive)]
    terms = bs[:-1] * (hat[2:] - hat[1:-1])
    if t != math.inf:
        terms = terms[s[2:] < t]
    return int(terms.sum(dtype=np.int64))


def naples_r(x: TickSeries, y: TickSeries, t: float = math.inf, inclusive: bool = True) -> int:
    """NAPLES index ``R(t; X, Y)``.

    Parameters
    ----------
    x, y : TickSeries
        The two observed series, on their own time grids.
    t : float
        Evaluation time; terms whose closing tick is not strictly before
        ``t`` are dropped. The default uses every term.
    inclusive : bool
        How a tick of the other series stamped at exactly the same time is
        treated. ``True`` counts it as already observed (``u_k <= t`` in the
        sign path), so a trade opened at ``s_i`` cannot earn a move printed
        at ``s_i`` itself. ``False`` is the strict ``u_k < t`` reading. The
        two agree whenever no X tick coincides with a Y tick.

    Returns
    -------
    int
        The index value, computed in O(n + m).
    """
    bx = _signs(x.prices)
    by = _signs(y.prices)
    first = _one_side(x.times, bx, y.times, by, t, inclusive)
    second = _one_side(y.times, by, x.times, bx, t, inclusive)
    return first - second


def naples_profile(x: TickSeries, y: TickSeries, grid: LagGrid, inclusive: bool = True) -> LagProfile:
    """R over the candidate lags; ``best_lag`` is its argmax.

    Each lag uses the full horizon of the shifted pair, so every fully
    observed term contributes.
    """
    values = np.array([naples_r(x, shift(y, -lag), inclusive=inclusive) for lag in grid.lags], dtype=np.int64)
    return LagProfile.from_values(grid.lags, values.astype(float), "naples")


@dataclass(frozen=True, eq=False)
class RollingEstimate:
    """Per-window lag estimates. Gap windows carry NaN in ``lags_hat`` and ``values``."""

    window_ends: np.ndarray
    lags_hat: np.ndarray
    values: np.ndarray
    window_length: float
    step: float

    @property
    def gaps(self) -> np.ndarray:
        return np.isnan(self.lags_hat)


def _restrict(s: TickSeries, lo: float, hi: float) -> Optional[TickSeries]:
    mask = s.between(lo, hi)
    if mask.sum() < 2:
        return None
    return TickSeries(s.times[mask], s.prices[mask], s.label)


def rolling_estimate(
    x: TickSeries,
    y: TickSeries,
    grid: LagGrid,
    window: float,
    step: float,
    estimator: Optional[Callable[[TickSeries, TickSeries, LagGrid], LagProfile]] = None,
) -> RollingEstimate:
    """Estimate the lag on sliding closed windows ``[e - window, e]``.

    Window ends run from ``min_time + window`` to ``max_time`` in steps of
    ``step``, where the time range spans both series. ``estimator``
    defaults to :func:`naples_profile`.
    """
    if not (window > 0 and step > 0):
        raise ValueError("window and step must be positive")
    estimator = estimator or naples_profile
    lo = min(x.start, y.start)
    hi = max(x.end, y.end)
    if window > hi - lo:
        raise WindowTooShort(f"window {window:g}s exceeds the sampled span {hi - lo:g}s")
    count = int(math.floor((hi - lo - window) / step + 1e-9)) + 1
    ends = lo + window + step * np.arange(count)
    lags_hat = np.full(count, np.nan)
    values = np.full(count, np.nan)
    for k, e in enumerate(ends):
        xs = _restrict(x, e - window, e)
        ys = _restrict(y, e - window, e)
        if xs is None or ys is None:
            continue
        prof = estimator(xs, ys, grid)
        lags_hat[k] = prof.best_lag
        values[k] = prof.best_value
    if np.isnan(lags_hat).all():
        raise WindowTooShort("no window holds at least 2 ticks of each series")
    return RollingEstimate(ends, lags_hat, values, float(window), float(step))
