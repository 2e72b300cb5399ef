"""Closed-form expectation of the NAPLES index under lead-lag Brownian motion.

Model: log X has Brownian increments on its own clock, log Y on X's clock
delayed by ``theta`` (positive theta: X leads Y), correlation ``rho``.
Every NAPLES term is a product of two return signs, and for a centred
Gaussian pair with correlation c

    E[sign(N) sign(M)] = 4 P(N > 0, M > 0) - 1 = (2 / pi) arcsin(c),

where c is ``rho`` times the overlap of the two increments' intervals
(on X's clock) over the geometric mean of their lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InterleavingViolation

__all__ = [
    "EquispacedModel",
    "GridModel",
    "expected_curve",
    "expected_r_equispaced",
    "expected_r_general",
    "firing_terms",
    "implied_scale",
    "orthant_probability",
]

_CLAMP = 1e-12


def _arcsin(c):
    c = np.asarray(c, dtype=float)
    if np.any(np.abs(c) > 1 + _CLAMP):
        raise DomainError(f"arcsin argument out of range: {float(np.max(np.abs(c)))!r}")
    return np.arcsin(np.clip(c, -1.0, 1.0))


def orthant_probability(rho: float) -> float:
    """P(N > 0, M > 0) for standard bivariate normals with correlation ``rho``."""
    if not -1 <= rho <= 1:
        raise DomainError(f"correlation must lie in [-1, 1], got {rho}")
    return 0.25 + math.asin(rho) / (2 * math.pi)


@dataclass(frozen=True)
class EquispacedModel:
    """Both assets observed every ``delta`` seconds; ``scale`` is the term count ``l``."""

    rho: float
    theta: float
    delta: float
    scale: float = 1.0

    def __post_init__(self):
        if not -1 <= self.rho <= 1:
            raise DomainError(f"correlation must lie in [-1, 1], got {self.rho}")
        if not self.delta > 0:
            raise DomainError(f"spacing must be positive, got {self.delta}")
        if not self.scale >= 0:
            raise DomainError(f"scale must be non-negative, got {self.scale}")


def expected_r_equispaced(m: EquispacedModel) -> float:
    """Piecewise arcsin curve for equispaced observation.

    ``(l/pi) sign(theta) arcsin(rho |theta| / delta)`` for ``|theta| <= delta``,
    ``(l/pi) sign(theta) arcsin(rho (2 delta - |theta|) / delta)`` for
    ``delta < |theta| < 2 delta``, zero elsewhere. Odd in ``theta`` bit for bit.
    """
    a = abs(m.theta)
    if a == 0 or a >= 2 * m.delta:
        return 0.0
    if a <= m.delta:
        arg = m.rho * a / m.delta
    else:
        arg = m.rho * (2 * m.delta - a) / m.delta
    value = m.scale / math.pi * float(_arcsin(arg))
    return value if m.theta > 0 else -value


def expected_curve(m: EquispacedModel, start: float, stop: float, step: float) -> list[tuple[float, float]]:
    """Tabulate :func:`expected_r_equispaced` over ``start:stop:step`` (``m.theta`` ignored)."""
    if step <= 0 or stop < start:
        raise ValueError("need step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9))
    out = []
    for k in range(n + 1):
        theta = start + step * k
        out.append((theta, expected_r_equispaced(EquispacedModel(m.rho, theta, m.delta, m.scale))))
    return out


@dataclass(frozen=True, eq=False)
class GridModel:
    """Arbitrary observation grids for X (``s_times``) and Y (``t_times``)."""

    s_times: np.ndarray
    t_times: np.ndarray
    rho: float
    theta: float

    def __post_init__(self):
        s = np.array(self.s_times, dtype=float)
        t = np.array(self.t_times, dtype=float)
        for name, arr in (("s_times", s), ("t_times", t)):
            if arr.ndim != 1 or len(arr) < 2:
                raise ValueError(f"{name} needs at least 2 times")
            bad = np.flatnonzero(np.diff(arr) <= 0)
            if bad.size:
                raise ValueError(f"{name} not strictly increasing at index {bad[0] + 1}")
        if not -1 <= self.rho <= 1:
            raise DomainError(f"correlation must lie in [-1, 1], got {self.rho}")
        object.__setattr__(self, "s_times", s)
        object.__setattr__(self, "t_times", t)


def check_interleaving(s: np.ndarray, t: np.ndarray) -> None:
    """At most one tick of either grid strictly between consecutive ticks of the other."""
    for a, b, which in ((s, t, "s"), (t, s, "t")):
        inside = np.searchsorted(b, a[1:], side="left") - np.searchsorted(b, a[:-1], side="right")
        bad = np.flatnonzero(inside > 1)
        if bad.size:
            raise InterleavingViolation(int(bad[0]), f"more than one opposite tick between {which}[{bad[0]}] and {which}[{bad[0] + 1}]")


def _term_pairs(a: np.ndarray, b: np.ndarray, inclusive: bool):
    """Pairs (i, k): sign of ``a`` at tick i times sign of ``b`` at tick k inside a's next interval.

    i runs over a's ticks 1..n-2 (tick 0 carries no return), k over b's
    ticks >= 1 in ``[a_i, a_{i+1})`` (strict) or ``(a_i, a_{i+1}]`` (inclusive).
    """
    side = "right" if inclusive else "left"
    before = np.searchsorted(b[1:], a, side=side)
    i_all = np.arange(1, len(a) - 1)
    lo = before[1:-1]
    hi = before[2:]
    counts = hi - lo
    i = np.repeat(i_all, counts)
    offset = np.repeat(lo - np.cumsum(counts) + counts, counts)
    k = offset + np.arange(counts.sum()) + 1
    return i, k


def _correlations(sx: np.ndarray, ix: np.ndarray, ty: np.ndarray, ky: np.ndarray, rho: float, theta: float):
    # X increment on (s_{i-1}, s_i]; Y increment on (t_{k-1}, t_k] maps to (t_{k-1}-theta, t_k-theta]
    a0, a1 = sx[ix - 1], sx[ix]
    b0, b1 = ty[ky - 1] - theta, ty[ky] - theta
    overlap = np.maximum(np.minimum(a1, b1) - np.maximum(a0, b0), 0.0)
    return rho * overlap / np.sqrt((a1 - a0) * (ty[ky] - ty[ky - 1]))


def _all_correlations(g: GridModel, inclusive: bool):
    s, t = g.s_times, g.t_times
    i, k = _term_pairs(s, t, inclusive)
    forward = _correlations(s, i, t, k, g.rho, g.theta)
    j, q = _term_pairs(t, s, inclusive)
    backward = _correlations(s, q, t, j, g.rho, g.theta)
    return forward, backward


def expected_r_general(g: GridModel, inclusive: bool = True, check: bool = True) -> float:
    """E[R] over the full horizon for arbitrary observation grids.

    Sums ``(2/pi) arcsin(c)`` over the X-then-Y terms and subtracts the same
    over the Y-then-X terms. Terms whose intervals do not overlap have
    ``c = 0`` and drop out. ``inclusive`` must match the convention passed
    to :func:`leadlag.naples.naples_r`; it only matters when ticks of the
    two grids coincide. With ``check`` the interleaving assumption (at most
    one opposite tick per interval) is enforced.
    """
    if check:
        check_interleaving(g.s_times, g.t_times)
    forward, backward = _all_correlations(g, inclusive)
    return 2.0 / math.pi * (math.fsum(_arcsin(forward).tolist()) - math.fsum(_arcsin(backward).tolist()))


def firing_terms(g: GridModel, inclusive: bool = True) -> int:
    """Number of terms whose indicator fires, i.e. whose intervals overlap."""
    forward, backward = _all_correlations(g, inclusive)
    return int(np.count_nonzero(forward) + np.count_nonzero(backward))


def implied_scale(g: GridModel, inclusive: bool = True) -> float:
    """The count ``l`` for :class:`EquispacedModel` implied by grid ``g``.

    Each firing term contributes ``(2/pi) arcsin``, so ``l`` is twice the
    number of firing terms.
    """
    return 2.0 * firing_terms(g, inclusive)
