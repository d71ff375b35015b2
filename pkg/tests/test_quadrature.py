import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressqed import (AccuracyWarning, Channel, GridQuadrature, IntegrandError,
                      ModelParams, MomentumGrid, integrate_singular)
from dressqed.massless import massless_bracket
from dressqed.quadrature import QuadInfo, grid_panel_rule, tanh_sinh_rule

mp.mp.dps = 30
P = ModelParams(0.1, 1.0)
ones = np.ones_like


def mp_kernel_integral(c, u, w, lam=1.0):
    u = mp.mpf(u)

    def k(v):
        if v == 0 or v == u:
            return mp.mpf(0)
        ex = (u - v) ** 2 / (2 * u * v)
        q0 = mp.log1p(2 / ex) / 2
        return v / u * (q0 if c == 0 else (1 + ex) * q0 - 1) * w(v)
    pts = [0, u, lam] if u < lam else [0, lam]
    return float(mp.quad(k, pts))


def test_tanh_sinh_endpoint_log():
    x, w, dl, dr = tanh_sinh_rule(1 / 16)
    # int_{-1}^{1} log(1 - x) dx = 2 log 2 - 2
    assert np.dot(w, np.log(dr)) == pytest.approx(2 * math.log(2) - 2, rel=1e-13)
    assert np.dot(w, x**4) == pytest.approx(0.4, rel=1e-13)
    assert np.allclose(dl, 1 + x) and np.allclose(dr, 1 - x)


@given(st.floats(min_value=-16, max_value=0))
def test_vector_unit_weight_matches_closed_form(lu):
    u = math.exp(lu)
    got = integrate_singular(Channel.VECTOR, u, ones, P)
    assert got == pytest.approx(u * massless_bracket(1.0 / u), rel=1e-11, abs=1e-14)


@pytest.mark.parametrize("u", [1e-4, 0.3, 0.999, 1.0])
@pytest.mark.parametrize("c", [0, 1])
def test_against_mpmath_smooth_weight(u, c):
    w = lambda v: 1 / np.sqrt(1 + np.asarray(v) ** 2)
    mw = lambda v: 1 / mp.sqrt(1 + v * v)
    got = integrate_singular(Channel(c), u, w, P, tol=1e-13)
    assert got == pytest.approx(mp_kernel_integral(c, u, mw), rel=1e-11)


def test_u_zero_limit():
    assert integrate_singular(Channel.SCALAR, 0.0, ones, P) == pytest.approx(2.0, rel=1e-13)
    assert integrate_singular(Channel.VECTOR, 0.0, ones, P) == 0.0


def test_nonfinite_integrand_reports_location():
    with pytest.raises(IntegrandError) as exc:
        integrate_singular(Channel.SCALAR, 0.5, lambda v: np.where(v > 0.7, np.nan, 1.0), P)
    assert exc.value.v > 0.7


def test_budget_exhaustion_warns():
    with pytest.warns(AccuracyWarning):
        val, info = integrate_singular(Channel.SCALAR, 0.5, lambda v: np.sin(200 * v), P,
                                       tol=1e-15, max_nodes=40, full_output=True)
    assert isinstance(info, QuadInfo) and not info.converged and math.isfinite(val)


def test_argument_validation():
    with pytest.raises(ValueError):
        integrate_singular(Channel.SCALAR, 1.5, ones, P)
    with pytest.raises(ValueError):
        integrate_singular(Channel.SCALAR, 0.5, ones, P, tol=0.0)


def test_node_budget_respected():
    _, info = integrate_singular(Channel.VECTOR, 0.3, ones, P, full_output=True)
    assert info.converged and info.n_evals > 0
    assert len(tanh_sinh_rule(2.0 ** -info.level)[0]) <= 200


@pytest.fixture(scope="module")
def gq():
    grid = MomentumGrid.log_uniform(math.exp(10), 128, 1e-8)
    return grid, GridQuadrature(grid)


def test_grid_rule_exact_for_unit_weight(gq):
    grid, quad = gq
    got = quad.integrate_function(Channel.VECTOR, ones)
    exact = grid.nodes * massless_bracket(grid.cutoff / grid.nodes)
    assert np.max(np.abs(got - exact) / exact) < 1e-12


@settings(max_examples=8)
@given(st.integers(0, 2**32 - 1))
def test_grid_rule_matches_adaptive_on_piecewise_linear(gq, seed):
    grid, quad = gq
    rng = np.random.default_rng(seed)
    vals = 1 + 0.2 * rng.random(len(grid))
    w = lambda v: np.interp(np.log(v), grid.log_nodes, vals)
    p = ModelParams(0.1, grid.cutoff)
    got = quad.integrate_function(Channel.SCALAR, w)
    for i in rng.choice(len(grid), 4, replace=False):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            ref = integrate_singular(Channel.SCALAR, grid.nodes[i], w, p, tol=1e-13,
                                     breakpoints=grid.nodes)
        assert got[i] == pytest.approx(ref, rel=1e-11)


def test_plain_panel_rule():
    grid = MomentumGrid.log_uniform(10.0, 40, 1e-6)
    v, w = grid_panel_rule(grid)
    assert np.sum(w) == pytest.approx(10.0, rel=1e-14)
    assert np.dot(w, v**2) == pytest.approx(1000 / 3, rel=1e-13)
