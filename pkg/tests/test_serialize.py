import io
import json
import math

import numpy as np
from hypothesis import given, strategies as st

from leadlag.naples import LagProfile, RollingEstimate
from leadlag.serialize import (
    profile_to_dict,
    read_curve_csv,
    read_profile_csv,
    read_rolling_csv,
    rolling_to_dict,
    write_curve_csv,
    write_profile_csv,
    write_records_csv,
    write_records_json,
    write_rolling_csv,
)

reals = st.floats(-1e9, 1e9, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(st.integers(-500, 500), reals), min_size=1, max_size=30, unique_by=lambda p: p[0]))
def test_profile_round_trip(pairs):
    pairs.sort()
    prof = LagProfile.from_values([p[0] / 4 for p in pairs], [p[1] for p in pairs], "naples")
    buf = io.StringIO()
    write_profile_csv(prof, buf)
    assert buf.getvalue().splitlines()[0] == "theta,value"
    back = read_profile_csv(io.StringIO(buf.getvalue()))
    assert np.array_equal(back.lags, prof.lags) and np.array_equal(back.values, prof.values)
    assert back.best_lag == prof.best_lag


@given(st.lists(st.one_of(reals, st.just(math.nan)), min_size=1, max_size=20))
def test_rolling_round_trip_with_gaps(lags):
    n = len(lags)
    values = [math.nan if math.isnan(v) else v * 2 for v in lags]
    roll = RollingEstimate(np.arange(n) * 60.0 + 3600, np.array(lags), np.array(values), 3600.0, 60.0)
    buf = io.StringIO()
    write_rolling_csv(roll, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "window_end,theta_hat,value"
    back = read_rolling_csv(io.StringIO(text), 3600.0, 60.0)
    assert np.array_equal(back.window_ends, roll.window_ends)
    assert np.array_equal(back.lags_hat, roll.lags_hat, equal_nan=True)
    assert np.array_equal(back.gaps, roll.gaps)
    d = rolling_to_dict(roll)
    assert json.loads(json.dumps(d))["theta_hat"] == [None if math.isnan(v) else v for v in lags]


def test_gap_rows_have_empty_fields():
    roll = RollingEstimate(np.array([10.0, 20.0]), np.array([math.nan, 3.0]), np.array([math.nan, 7.0]), 10.0, 10.0)
    buf = io.StringIO()
    write_rolling_csv(roll, buf)
    assert buf.getvalue().splitlines()[1] == "10.0,,"


@given(st.lists(st.tuples(reals, reals), max_size=20))
def test_curve_round_trip(points):
    buf = io.StringIO()
    write_curve_csv(points, buf)
    assert read_curve_csv(io.StringIO(buf.getvalue())) == [(float(a), float(b)) for a, b in points]


def test_wrong_header_rejected():
    import pytest

    with pytest.raises(ValueError):
        read_curve_csv(io.StringIO("a,b\n1,2\n"))


def test_records_writers():
    recs = [{"estimator": "naples", "horizon": 1000.0, "mae": 0.1 + 0.2}]
    buf = io.StringIO()
    write_records_json(recs, buf)
    assert json.loads(buf.getvalue()) == recs
    buf = io.StringIO()
    write_records_csv(recs, buf)
    assert buf.getvalue().splitlines() == ["estimator,horizon,mae", "naples,1000.0,0.30000000000000004"]


def test_profile_dict_carries_midpoint_and_meta():
    prof = LagProfile.from_values([-1, 0, 1], [-2, 0, 2], "naples")
    d = profile_to_dict(prof)
    assert d["best_lag"] == 1 and d["worst_lag"] == -1 and d["midpoint_lag"] == 0
    assert "midpoint_lag" not in profile_to_dict(LagProfile.from_values([0], [1], "ds", {"resolution": 1.0}))
