import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dressqed import ModelParams, massless_asymptote, massless_g1
from dressqed.massless import massless_bracket

mp.mp.dps = 50


def mp_bracket(x):
    x = mp.mpf(x)
    return (mp.mpf(2) / 3 * mp.log(abs(x * x - 1)) - x * x / 3
            + x / 6 * mp.log(abs((x + 1) / (x - 1))) * (3 + x * x))


@given(st.floats(min_value=1e-6, max_value=12.0))
def test_bracket_matches_high_precision(lx):
    x = 1.0 + math.expm1(lx) if lx < 1 else math.exp(lx)
    if x == 1.0:
        return
    assert massless_bracket(x) == pytest.approx(float(mp_bracket(x)), rel=1e-13, abs=1e-15)


def test_bracket_at_one_is_the_limit():
    assert massless_bracket(1.0) == pytest.approx(4 / 3 * math.log(2) - 1 / 3, rel=1e-15)
    assert massless_bracket(1.0 + 1e-12) == pytest.approx(massless_bracket(1.0), abs=1e-9)


def test_bracket_continuous_at_series_switch():
    lo, hi = massless_bracket(2.0 - 1e-12), massless_bracket(2.0)
    assert lo == pytest.approx(hi, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 1 / 137])
def test_g1_grows_above_free(alpha):
    p = ModelParams(alpha, 1.0, 0.0)
    u = np.geomspace(1e-8, 1.0, 40)
    g1 = massless_g1(u, p)
    assert np.all(g1 >= u)
    assert np.all(np.diff(g1) > 0)


def test_asymptote_deviation_shrinks():
    p = ModelParams(1 / 137, 1.0, 0.0)
    u = np.array([1e-3, 1e-5, 1e-7])
    dev = np.abs(massless_g1(u, p) - massless_asymptote(u, p)) / (u * np.log(1 / u))
    assert np.all(np.diff(dev) < 0)


def test_domain():
    with pytest.raises(ValueError):
        massless_g1(0.5, ModelParams(0.1, 1.0, 1.0))
    with pytest.raises(ValueError):
        massless_g1(1.5, ModelParams(0.1, 1.0, 0.0))
    with pytest.raises(ValueError):
        massless_g1(0.0, ModelParams(0.1, 1.0, 0.0))
    with pytest.raises(ValueError):
        massless_bracket(0.9)
    assert massless_g1(1.0, ModelParams(0.1, 1.0, 0.0)) > 1.0


@pytest.mark.parametrize("alpha", [0.1, 1 / 137])
def test_log_normalised_deviation_decays(alpha):
    p = ModelParams(alpha, 1.0, 0.0)
    u = np.array([1e-4, 1e-6, 1e-8])
    dev = np.abs(massless_g1(u, p) - massless_asymptote(u, p)) / (u * np.log(1 / u))
    assert np.all(np.diff(dev) < 0)
