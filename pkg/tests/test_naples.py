import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import tick_arrays, tick_pairs
from leadlag import LagGrid, TickSeries, WindowTooShort, naples_profile, naples_r, rolling_estimate, validate
from leadlag.naples import LagProfile, argmax_lag, estimate_lag
from leadlag.sim import GbmPairConfig, simulate_pair
from oracles import naples_bruteforce

HAND_X = validate([0, 1, 2, 3], [100, 101, 102, 101])
HAND_Y = validate([0.5, 1.5, 2.5, 3.5], [100, 101, 102, 103])


def test_hand_example():
    # X-then-Y terms: (+1)(1-0) + (+1)(2-1) = 2; Y-then-X terms: (+1)(2-1) + (+1)(1-2) = 0
    assert naples_r(HAND_X, HAND_Y, 4.0) == 2
    assert naples_bruteforce(HAND_X.times, HAND_X.prices, HAND_Y.times, HAND_Y.prices, 4.0) == 2
    assert naples_r(HAND_Y, HAND_X, 4.0) == -2


def test_hand_example_truncation():
    # at t=3 only terms closing before 3 count: X side (+1)(1-0) = 1, Y side (+1)(2-1) = 1
    assert naples_r(HAND_X, HAND_Y, 3.0) == 0
    assert naples_r(HAND_X, HAND_Y, 2.75) == 0
    assert naples_r(HAND_X, HAND_Y, 2.25) == 1
    assert naples_r(HAND_X, HAND_Y, 0.0) == 0


def test_copy_gives_zero():
    assert naples_r(HAND_X, HAND_X) == 0
    y = TickSeries(HAND_X.times.copy(), HAND_X.prices.copy())
    assert naples_r(HAND_X, y, 2.5) == 0


def test_returns_python_int():
    assert type(naples_r(HAND_X, HAND_Y)) is int


@settings(max_examples=300)
@given(tick_pairs(), st.booleans(), st.one_of(st.just(math.inf), st.integers(0, 42).map(lambda k: k * 0.5)))
def test_matches_bruteforce(pair, inclusive, t):
    xt, xp, yt, yp = pair
    fast = naples_r(TickSeries(xt, xp), TickSeries(yt, yp), t, inclusive=inclusive)
    assert fast == naples_bruteforce(xt, xp, yt, yp, t, inclusive)


@given(tick_pairs(lattice=False), st.booleans())
def test_conventions_agree_without_coincident_ticks(pair, inclusive):
    xt, xp, yt, yp = pair
    x, y = TickSeries(xt, xp), TickSeries(yt, yp)
    if np.intersect1d(xt, yt).size == 0:
        assert naples_r(x, y, inclusive=True) == naples_r(x, y, inclusive=False)


@given(tick_pairs(), st.booleans(), st.floats(-5, 30, allow_nan=False))
def test_antisymmetry(pair, inclusive, t):
    xt, xp, yt, yp = pair
    x, y = TickSeries(xt, xp), TickSeries(yt, yp)
    assert naples_r(x, y, t, inclusive) == -naples_r(y, x, t, inclusive)


@given(tick_arrays(), st.booleans(), st.floats(-5, 30, allow_nan=False))
def test_self_zero(arr, inclusive, t):
    x = TickSeries(*arr)
    assert naples_r(x, x, t, inclusive) == 0


@given(tick_pairs())
def test_piecewise_constant_between_ticks(pair):
    xt, xp, yt, yp = pair
    x, y = TickSeries(xt, xp), TickSeries(yt, yp)
    stamps = np.unique(np.concatenate([xt, yt]))
    for a, b in zip(stamps[:-1], stamps[1:]):
        # R only moves when t passes a tick, so (a, b] is a single level
        assert naples_r(x, y, 0.5 * (a + b)) == naples_r(x, y, b)


@pytest.mark.parametrize(
    "values,lags,expected",
    [([1, 3, 3], [-1, 0, 1], 0), ([2, 1, 1], [-1, 0, 1], -1), ([5, 5], [-2, 2], -2)],
)
def test_estimate_lag_tie_break(values, lags, expected):
    prof = LagProfile.from_values(lags, values, "naples")
    assert prof.best_lag == expected
    assert estimate_lag(prof) == expected


def test_argmax_ignores_nan():
    assert argmax_lag([0, 1, 2], [np.nan, 1, 0]) == 1
    with pytest.raises(ValueError):
        argmax_lag([0, 1], [np.nan, np.nan])


def test_grid_parsing():
    g = LagGrid.parse("-100:100:1")
    assert len(g) == 201 and g.lags[0] == -100 and g.lags[-1] == 100
    assert LagGrid.parse("0:1:0.25").lags.tolist() == [0, 0.25, 0.5, 0.75, 1]
    assert LagGrid.from_range(0, 1, 0.3).lags[-1] == pytest.approx(0.9)
    for bad in ["1:2", "a:b:c", "0:10:0", "5:1:1"]:
        with pytest.raises(ValueError):
            LagGrid.parse(bad)
    with pytest.raises(ValueError):
        LagGrid([1, 1])


def test_profile_of_constant_series():
    x = validate([0, 1, 2, 3], [5, 5, 5, 5])
    y = validate([0.3, 1.3, 2.3], [7, 7, 7])
    prof = naples_profile(x, y, LagGrid.from_range(-3, 3, 1))
    assert np.all(prof.values == 0)
    assert prof.best_lag == 0
    assert naples_profile(x, y, LagGrid.from_range(1, 3, 1)).best_lag == 1


def test_singleton_grid():
    prof = naples_profile(HAND_X, HAND_Y, LagGrid([7.5]))
    assert prof.best_lag == 7.5 and prof.lags.tolist() == [7.5]


@given(tick_pairs(max_total=20), st.lists(st.integers(-8, 8), min_size=1, max_size=5, unique=True))
def test_profile_values_are_shifted_r(pair, lags):
    xt, xp, yt, yp = pair
    x, y = TickSeries(xt, xp), TickSeries(yt, yp)
    lags = sorted(lags)
    prof = naples_profile(x, y, LagGrid(lags))
    for lag, v in zip(lags, prof.values):
        # Y(t + lag) is observed at t_j - lag
        assert v == naples_bruteforce(xt, xp, yt - lag, yp)
    assert prof.best_value == prof.values[list(prof.lags).index(prof.best_lag)]


def test_profile_sign_follows_leader():
    # Y copies X's moves two seconds later on a 3 s clock. R is positive while the
    # residual lag (2 - candidate) lies in (0, 3), negative when it lies in (-3, 0).
    xt = np.arange(0, 60, 3.0)
    xp = 100 * np.exp(np.cumsum(np.where(np.arange(20) % 3 == 0, -0.01, 0.01)))
    x = validate(xt, xp)
    y = validate(xt + 2.0, xp)
    assert naples_r(x, y) > 0
    prof = naples_profile(x, y, LagGrid.from_range(-6, 6, 1))
    assert -1 < prof.best_lag < 2 < prof.worst_lag < 5


@pytest.mark.xfail(strict=True, reason="argmax of R sits near theta minus one tick interval; see decisions ledger")
def test_simulated_profile_peaks_near_true_lag():
    x, y = simulate_pair(GbmPairConfig(rho=0.9, theta=10, horizon=1e4, seed=0))
    prof = naples_profile(x, y, LagGrid.from_range(-100, 100, 1))
    assert abs(prof.best_lag - 10) <= 1


def test_simulated_profile_brackets_true_lag():
    # the extremes straddle the true lag; their midpoint lands close to it
    x, y = simulate_pair(GbmPairConfig(rho=0.9, theta=10, horizon=1e4, seed=0))
    prof = naples_profile(x, y, LagGrid.from_range(-100, 100, 1))
    assert 0 < prof.best_lag < 10 < prof.worst_lag
    assert abs(prof.midpoint_lag - 10) <= 2


# rolling windows


def test_rolling_single_window_equals_full_sample():
    x, y = simulate_pair(GbmPairConfig(horizon=2000, seed=3))
    grid = LagGrid.from_range(-30, 30, 1)
    span = max(x.end, y.end) - min(x.start, y.start)
    roll = rolling_estimate(x, y, grid, window=span, step=span)
    full = naples_profile(x, y, grid)
    assert len(roll.window_ends) == 1
    assert roll.lags_hat[0] == full.best_lag and roll.values[0] == full.best_value


def test_rolling_window_ends_and_gaps():
    x = validate([0, 1, 2, 10, 11, 12], [1, 2, 1, 2, 1, 2])
    y = validate([0.5, 1.5, 2.5, 10.5, 11.5, 12.5], [1, 2, 1, 2, 1, 2])
    roll = rolling_estimate(x, y, LagGrid.from_range(-1, 1, 0.5), window=3, step=1)
    assert np.allclose(np.diff(roll.window_ends), 1.0)
    assert roll.window_ends[0] == 3.0 and roll.window_ends[-1] <= 12.5
    assert len(roll.lags_hat) == len(roll.values) == len(roll.window_ends)
    # windows ending at 6..9 hold no ticks at all
    assert roll.gaps[roll.window_ends.tolist().index(7.0)]
    assert not roll.gaps[0]


def test_rolling_window_longer_than_span():
    with pytest.raises(WindowTooShort):
        rolling_estimate(HAND_X, HAND_Y, LagGrid([0]), window=100, step=1)


def test_rolling_no_usable_window():
    x = validate([0, 1, 100, 101], [1, 2, 1, 2])
    y = validate([50, 51, 150, 151], [1, 2, 1, 2])
    with pytest.raises(WindowTooShort):
        rolling_estimate(x, y, LagGrid([0]), window=5, step=5)


def test_rolling_rejects_nonpositive_parameters():
    with pytest.raises(ValueError):
        rolling_estimate(HAND_X, HAND_Y, LagGrid([0]), window=0, step=1)


def test_rolling_custom_estimator():
    from leadlag.baselines import hry_estimate

    x, y = simulate_pair(GbmPairConfig(horizon=3000, seed=5))
    roll = rolling_estimate(x, y, LagGrid.from_range(-20, 20, 1), 1000, 1000, estimator=hry_estimate)
    assert not roll.gaps.any()


@pytest.mark.xfail(strict=True, reason="windowed argmax inherits the one-interval bias; see decisions ledger")
def test_rolling_stationary_pair():
    x, y = simulate_pair(GbmPairConfig(rho=0.9, theta=10, horizon=1e4, seed=0))
    roll = rolling_estimate(x, y, LagGrid.from_range(-100, 100, 1), window=1000, step=500)
    hits = np.abs(roll.lags_hat[~roll.gaps] - 10) <= 1
    assert hits.mean() >= 0.8
