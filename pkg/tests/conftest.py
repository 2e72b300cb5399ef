import sys
from pathlib import Path

import numpy as np
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@st.composite
def tick_arrays(draw, min_size=2, max_size=15, lattice=True):
    """(times, prices). Lattice times make ties across series common; few price levels make zero returns common."""
    n = draw(st.integers(min_size, max_size))
    if lattice:
        pool = st.integers(0, 40).map(lambda k: k * 0.5)
    else:
        pool = st.integers(0, 10**7).map(lambda k: k / 1000.0)
    times = sorted(draw(st.sets(pool, min_size=n, max_size=n)))
    prices = draw(st.lists(st.sampled_from([98.0, 99.0, 100.0, 101.0, 102.5]), min_size=n, max_size=n))
    return np.array(times), np.array(prices)


@st.composite
def tick_pairs(draw, max_total=30, lattice=True):
    n = draw(st.integers(2, max_total - 2))
    xt, xp = draw(tick_arrays(min_size=n, max_size=n, lattice=lattice))
    yt, yp = draw(tick_arrays(min_size=2, max_size=max_total - n, lattice=lattice))
    return xt, xp, yt, yp
