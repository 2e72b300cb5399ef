"""Lead-lag geometric Brownian motion pairs on non-synchronous grids.

    X_t = x0 * exp(sigma1 * B_t)
    Y_t = y0 * exp(rho * sigma2 * B_{t-theta} + sigma2 * sqrt(1 - rho^2) * W_{t-theta})

with B, W independent standard Brownian motions and ``B_0 = W_0 = 0``. No
drift correction is applied. Positive ``theta`` means X leads Y.

Randomness is split into named streams derived from one 64-bit seed. B is
drawn on X's grid first; its values at Y's delayed times are then filled in
by exact Brownian-bridge interpolation from a separate stream, so X depends
only on the seed and its own grid, whatever Y's grid or parameters are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidConfig
from .ticks import TickSeries

__all__ = [
    "GbmPairConfig",
    "SamplingLaw",
    "STREAMS",
    "gbm_pair",
    "rng_for",
    "sample_times",
    "simulate_pair",
]

STREAMS = {"path-B": 0, "path-W": 1, "grid-s": 2, "grid-t": 3, "path-B-fill": 4}
_MERGE_TOL = 1e-12
_MASK64 = (1 << 64) - 1


def rng_for(seed: int, stream: str) -> np.random.Generator:
    """PCG64 generator for a named stream of ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=(STREAMS[stream],))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SamplingLaw:
    """Truncated Gaussian inter-arrival law; non-positive gaps are redrawn."""

    mean: float = 10.0
    sd: float = 2.0

    def __post_init__(self):
        if not self.mean > 0:
            raise InvalidConfig(f"mean gap must be positive, got {self.mean}")
        if not self.sd >= 0:
            raise InvalidConfig(f"gap sd must be non-negative, got {self.sd}")


def sample_times(law: SamplingLaw, horizon: float, seed: int, stream: str = "grid-s") -> np.ndarray:
    """Observation times ``0 = u_0 < u_1 < ... = horizon``.

    Gaps are drawn i.i.d. from ``Normal(mean, sd)``, redrawing gaps <= 0.
    The first time reaching ``horizon`` is clamped to it.
    """
    if not horizon > 0:
        raise InvalidConfig(f"horizon must be positive, got {horizon}")
    rng = rng_for(seed, stream)
    times = [np.zeros(1)]
    last = 0.0
    batch = max(16, int(1.1 * horizon / law.mean) + 16)
    while last < horizon:
        gaps = rng.normal(law.mean, law.sd, size=batch) if law.sd > 0 else np.full(batch, law.mean)
        gaps = gaps[gaps > 0]
        chunk = last + np.cumsum(gaps)
        times.append(chunk)
        if chunk.size:
            last = float(chunk[-1])
    out = np.concatenate(times)
    n = int(np.searchsorted(out, horizon, side="left"))
    out = out[: n + 1].copy()
    out[-1] = horizon
    return out


@dataclass(frozen=True)
class GbmPairConfig:
    x0: float = 100.0
    y0: float = 100.0
    sigma1: float = 1.0
    sigma2: float = 1.0
    rho: float = 0.9
    theta: float = 10.0
    horizon: float = 1e4
    seed: int = 0

    def __post_init__(self):
        if not (self.x0 > 0 and self.y0 > 0):
            raise InvalidConfig("initial prices must be positive")
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise InvalidConfig("volatilities must be positive")
        if not -1 <= self.rho <= 1:
            raise InvalidConfig(f"correlation must lie in [-1, 1], got {self.rho}")
        if not math.isfinite(self.theta):
            raise InvalidConfig("lag must be finite")
        if not self.horizon > 0:
            raise InvalidConfig("horizon must be positive")
        if not 0 <= int(self.seed) <= _MASK64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")


def _brownian_at(points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """A Brownian path with value 0 at time 0, evaluated at ``points``.

    Exact Gaussian increments on the sorted union of ``points`` and 0;
    points closer than 1e-12 share a value.
    """
    grid = np.unique(np.concatenate([points, [0.0]]))
    keep = np.concatenate([[True], np.diff(grid) > _MERGE_TOL])
    grid = grid[keep]
    steps = rng.standard_normal(len(grid) - 1) * np.sqrt(np.diff(grid))
    path = np.concatenate([[0.0], np.cumsum(steps)])
    path -= path[np.searchsorted(grid, 0.0)]
    # map every point to its (possibly merged) grid node
    idx = np.searchsorted(grid, points, side="right") - 1
    return path[idx]


def _fill_brownian(nodes: np.ndarray, values: np.ndarray, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Values at ``points`` of a Brownian path already fixed at sorted ``nodes``.

    A free Brownian path is drawn on the union of nodes and points, then
    pinned to ``values`` at the nodes: a bridge between neighbouring nodes,
    a free continuation beyond the outermost ones. This is the exact
    conditional law given the node values.
    """
    grid = np.unique(np.concatenate([nodes, points]))
    keep = np.concatenate([[True], np.diff(grid) > _MERGE_TOL])
    grid = grid[keep]
    free = np.concatenate([[0.0], np.cumsum(rng.standard_normal(len(grid) - 1) * np.sqrt(np.diff(grid)))])
    # nodes and points mapped to their (possibly merged) grid position
    node_pos = np.searchsorted(grid, nodes, side="right") - 1
    pos = np.searchsorted(grid, points, side="right") - 1
    u = grid[pos]
    w = free[pos]
    right = np.clip(np.searchsorted(nodes, u, side="left"), 0, len(nodes) - 1)
    left = np.clip(np.searchsorted(nodes, u, side="right") - 1, 0, len(nodes) - 1)
    a, b = nodes[left], nodes[right]
    wa, wb = free[node_pos[left]], free[node_pos[right]]
    va, vb = values[left], values[right]
    inside = (b > a) & (u > a) & (u < b)
    frac = np.where(inside, (u - a) / np.where(b > a, b - a, 1.0), 0.0)
    bridged = va + (w - wa) - frac * (wb - wa) + frac * (vb - va)
    # outside [nodes[0], nodes[-1]] or on a node: continue from the nearest node
    ref = np.where(u >= a, left, right)
    ref = np.where(u < nodes[0], 0, ref)
    loose = values[ref] + (w - free[node_pos[ref]])
    return np.where(inside, bridged, loose)


def gbm_pair(
    cfg: GbmPairConfig,
    s_times,
    t_times,
    lags=None,
) -> tuple[TickSeries, TickSeries]:
    """Sample X at ``s_times`` and Y at ``t_times``.

    ``lags`` optionally gives a per-tick lag for Y (same length as
    ``t_times``), overriding ``cfg.theta``; used for regime-switch designs.
    """
    s = np.asarray(s_times, dtype=float)
    t = np.asarray(t_times, dtype=float)
    theta = np.full(len(t), float(cfg.theta)) if lags is None else np.asarray(lags, dtype=float)
    if theta.shape != t.shape:
        raise InvalidConfig("lags must match t_times in length")
    delayed = t - theta
    nodes = np.unique(np.concatenate([s, [0.0]]))
    node_values = _brownian_at(nodes, rng_for(cfg.seed, "path-B"))
    bx = node_values[np.searchsorted(nodes, s)]
    by = _fill_brownian(nodes, node_values, delayed, rng_for(cfg.seed, "path-B-fill"))
    W = _brownian_at(delayed, rng_for(cfg.seed, "path-W"))
    with np.errstate(over="ignore"):
        x = cfg.x0 * np.exp(cfg.sigma1 * bx)
        y = cfg.y0 * np.exp(cfg.rho * cfg.sigma2 * by + cfg.sigma2 * math.sqrt(1 - cfg.rho**2) * W)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(x > 0) and np.all(y > 0)):
        raise InvalidConfig("simulated prices overflow or underflow; lower the volatilities or the horizon")
    return TickSeries(s, x, "X"), TickSeries(t, y, "Y")


def simulate_pair(
    cfg: GbmPairConfig,
    law: Optional[SamplingLaw] = None,
    lags=None,
) -> tuple[TickSeries, TickSeries]:
    """Draw both grids from ``law`` (streams ``grid-s``/``grid-t``) and sample the pair."""
    law = law or SamplingLaw()
    s = sample_times(law, cfg.horizon, cfg.seed, "grid-s")
    t = sample_times(law, cfg.horizon, cfg.seed, "grid-t")
    if callable(lags):
        lags = lags(t)
    return gbm_pair(cfg, s, t, lags)
