"""Experiment drivers: MAE convergence benchmark and the Monte Carlo oracle suite.

Per-trial seeds come from :func:`mix_seed` (splitmix64 finalizer chained
over the base seed and the trial coordinates), so every trial is
reproducible on its own and results do not depend on execution order or
on the number of worker processes.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .baselines import ds_estimate, hry_estimate
from .naples import LagGrid, naples_profile, naples_r
from .sim import GbmPairConfig, SamplingLaw, gbm_pair, sample_times, simulate_pair
from .theory import EquispacedModel, GridModel, expected_r_equispaced, implied_scale

logger = logging.getLogger(__name__)

ESTIMATORS = ("naples", "hry", "ds", "naples_mid")
_MASK64 = (1 << 64) - 1


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(base: int, *indices: int) -> int:
    """Fold ``indices`` into ``base`` with splitmix64: ``z = splitmix64(z ^ index)`` per index."""
    z = splitmix64(int(base) & _MASK64)
    for k in indices:
        z = splitmix64(z ^ (int(k) & _MASK64))
    return z


@dataclass(frozen=True)
class ConvergenceConfig:
    horizons: tuple = (10**2.5, 10**3, 10**3.5, 10**4)
    trials: int = 100
    estimators: tuple = ("naples", "hry")
    grid: LagGrid = field(default_factory=lambda: LagGrid.from_range(-100, 100, 1))
    sim: GbmPairConfig = field(default_factory=GbmPairConfig)
    sampling: SamplingLaw = field(default_factory=SamplingLaw)
    base_seed: int = 0
    ds_resolution: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        h = np.asarray(self.horizons, dtype=float)
        if h.size == 0 or np.any(h <= 0) or np.any(np.diff(h) <= 0):
            raise ValueError("horizons must be positive and increasing")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}; choose from {ESTIMATORS}")


@dataclass(frozen=True)
class ConvergenceRow:
    estimator: str
    horizon: float
    trials: int
    mae: float
    se: float
    mean_seconds: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple

    def row(self, estimator: str, horizon: float) -> ConvergenceRow:
        for r in self.rows:
            if r.estimator == estimator and math.isclose(r.horizon, horizon, rel_tol=1e-12):
                return r
        raise KeyError((estimator, horizon))

    def to_records(self) -> list[dict]:
        return [asdict(r) for r in self.rows]


class TrialError(RuntimeError):
    def __init__(self, horizon_index: int, trial: int, cause: BaseException):
        self.horizon_index = horizon_index
        self.trial = trial
        self.cause = cause
        super().__init__(f"trial {trial} at horizon #{horizon_index} failed: {cause!r}")

    def __reduce__(self):
        return (type(self), (self.horizon_index, self.trial, self.cause))


def _estimate(name: str, x, y, cfg: ConvergenceConfig) -> float:
    if name == "naples":
        return naples_profile(x, y, cfg.grid).best_lag
    if name == "naples_mid":
        return naples_profile(x, y, cfg.grid).midpoint_lag
    if name == "hry":
        return hry_estimate(x, y, cfg.grid).best_lag
    return ds_estimate(x, y, cfg.ds_resolution, cfg.grid).best_lag


def run_trial(cfg: ConvergenceConfig, horizon_index: int, trial: int) -> dict:
    """One simulated pair, every selected estimator: ``{name: (abs_error, seconds)}``."""
    try:
        seed = mix_seed(cfg.base_seed, horizon_index, trial)
        sim = replace(cfg.sim, horizon=float(cfg.horizons[horizon_index]), seed=seed)
        x, y = simulate_pair(sim, cfg.sampling)
        out = {}
        for name in cfg.estimators:
            t0 = time.perf_counter()
            lag = _estimate(name, x, y, cfg)
            out[name] = (abs(lag - sim.theta), time.perf_counter() - t0)
        return out
    except Exception as exc:  # noqa: BLE001 - re-raised with the trial coordinates
        raise TrialError(horizon_index, trial, exc) from exc


def _trial_args(cfg: ConvergenceConfig):
    return [(cfg, h, k) for h in range(len(cfg.horizons)) for k in range(cfg.trials)]


def _call(args):
    return run_trial(*args)


def run_convergence(cfg: ConvergenceConfig, workers: int = 1) -> ConvergenceReport:
    """Mean absolute lag error per estimator and horizon.

    SE is the sample standard deviation of the absolute errors over
    ``sqrt(trials)`` (0 for a single trial). Aggregation happens after all
    trials finish, in fixed (horizon, trial) order.
    """
    args = _trial_args(cfg)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_call, args, chunksize=max(1, len(args) // (4 * workers))))
    else:
        results = [_call(a) for a in args]
    rows = []
    for name in cfg.estimators:
        for h, horizon in enumerate(cfg.horizons):
            chunk = results[h * cfg.trials:(h + 1) * cfg.trials]
            err = np.array([r[name][0] for r in chunk])
            secs = np.array([r[name][1] for r in chunk])
            se = float(err.std(ddof=1) / math.sqrt(len(err))) if len(err) > 1 else 0.0
            rows.append(ConvergenceRow(name, float(horizon), cfg.trials, float(err.mean()), se, float(secs.mean())))
            logger.info("%s T=%.4g MAE=%.3f se=%.3f", name, horizon, rows[-1].mae, se)
    return ConvergenceReport(tuple(rows))


@dataclass(frozen=True)
class OracleCell:
    rho: float
    theta: float
    analytic: float
    mean: float
    se: float
    z: float
    scale: float
    paths: int


def oracle_cell(
    rho: float,
    theta: float,
    delta: float = 10.0,
    paths: int = 2000,
    horizon: float = 1e4,
    base_seed: int = 0,
    inclusive: bool = True,
) -> OracleCell:
    """Monte Carlo mean of R(T) on equispaced grids against the closed form.

    Both assets are observed every ``delta`` seconds on the same clock.
    The count ``l`` comes from :func:`leadlag.theory.implied_scale`.
    """
    grid = sample_times(SamplingLaw(delta, 0.0), horizon, 0)
    scale = implied_scale(GridModel(grid, grid, rho, theta), inclusive=inclusive)
    analytic = expected_r_equispaced(EquispacedModel(rho, theta, delta, scale))
    draws = np.empty(paths)
    cell_seed = mix_seed(base_seed, int(round(rho * 1e6)) & _MASK64, int(round(theta * 1e6)) & _MASK64)
    for k in range(paths):
        cfg = GbmPairConfig(rho=rho, theta=theta, horizon=horizon, seed=mix_seed(cell_seed, k))
        x, y = gbm_pair(cfg, grid, grid)
        draws[k] = naples_r(x, y, inclusive=inclusive)
    mean = float(draws.mean())
    se = float(draws.std(ddof=1) / math.sqrt(paths))
    if se > 0:
        z = (mean - analytic) / se
    else:
        z = 0.0 if mean == analytic else math.copysign(math.inf, mean - analytic)
    return OracleCell(rho, theta, analytic, mean, se, z, scale, paths)


def run_oracle_suite(
    rhos: Sequence[float],
    thetas: Sequence[float],
    delta: float = 10.0,
    paths: int = 2000,
    horizon: float = 1e4,
    base_seed: int = 0,
    inclusive: bool = True,
) -> list[OracleCell]:
    return [
        oracle_cell(r, th, delta, paths, horizon, base_seed, inclusive)
        for r in rhos
        for th in thetas
    ]
