import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressqed import (DressingFunctions, FixedPointMap, ModelParams, MomentumGrid,
                      SingularInputError, apply_T, contraction_parameters, envelope_bounds,
                      membership_check, solve_fixed_point, sup_distance)
from dressqed.solver import FEASIBILITY_LIMIT, certified_box

alphas = st.floats(min_value=1e-4, max_value=0.05)
log_lams = st.floats(min_value=0.5, max_value=20.0)


@given(alphas, log_lams)
def test_contraction_formulas(alpha, ll):
    c = contraction_parameters(ModelParams.from_ratio(alpha, math.exp(ll)))
    assert c.Y == pytest.approx(alpha * math.asinh(math.exp(ll)) / math.pi, rel=1e-14)
    if c.Y < 9 / 50:
        assert c.epsilon == pytest.approx(50 * c.Y / (9 - 50 * c.Y), rel=1e-12)
    assert c.delta == pytest.approx(c.Y / (1 - c.Y), rel=1e-12)
    assert c.theoretical_rate == pytest.approx((2 + c.epsilon + c.delta) * c.Y, rel=1e-12)
    assert c.feasible == (c.Y < FEASIBILITY_LIMIT)


@given(alphas, log_lams, log_lams)
def test_Y_monotone_in_cutoff(alpha, a, b):
    lo, hi = sorted((a, b))
    ya = contraction_parameters(ModelParams.from_ratio(alpha, math.exp(lo))).Y
    yb = contraction_parameters(ModelParams.from_ratio(alpha, math.exp(hi))).Y
    assert ya <= yb


@given(alphas)
def test_threshold_is_where_Y_hits_one_seventh(alpha):
    c = contraction_parameters(ModelParams.from_ratio(alpha, 10.0))
    log_lam = c.log_lambda_over_m0_at_threshold
    if log_lam < 700:
        y = contraction_parameters(ModelParams.from_ratio(alpha, math.exp(log_lam))).Y
        assert y == pytest.approx(1 / 7, rel=1e-10)


def test_threshold_at_fine_structure():
    c = contraction_parameters(ModelParams.from_ratio(1 / 137, 1.0))
    assert c.log_lambda_over_m0_at_threshold == pytest.approx(
        math.log(math.sinh(137 * math.pi / 7)), rel=1e-14)


@given(alphas, st.floats(0.5, 12.0))
def test_envelope_equals_box_edge(alpha, ll):
    p = ModelParams.from_ratio(alpha, math.exp(ll))
    c = contraction_parameters(p)
    if not c.feasible:
        return
    g0_max, h1_max = envelope_bounds(p, c)
    assert g0_max == pytest.approx(1 + c.delta, rel=1e-12)
    assert h1_max == pytest.approx(1 + c.epsilon, rel=1e-12)


def test_massless_rejected():
    with pytest.raises(ValueError):
        contraction_parameters(ModelParams(0.1, 1.0, 0.0))
    with pytest.raises(ValueError):
        solve_fixed_point(ModelParams(0.1, 1.0, 0.0))


GRID_P = ModelParams.from_ratio(1 / 137, math.exp(8))
GRID = MomentumGrid.log_uniform(GRID_P.cutoff, 64, 1e-8)
BOX = certified_box(contraction_parameters(GRID_P))
unit = st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3)


def box_function(c0, c1):
    s = np.linspace(0.0, 1.0, len(GRID))
    prof = lambda c: c[0] * (c[1] + (1 - c[1]) * np.cos(3 * s + c[2])) / 2 + 0.5 * c[0]
    h0 = 1 + BOX.delta * np.clip(prof(c0), 0, 1)
    h1 = 1 + BOX.epsilon * np.clip(prof(c1), 0, 1)
    return DressingFunctions(GRID, h0, h1)


@settings(max_examples=15)
@given(unit, unit)
def test_T_maps_box_into_itself(c0, c1):
    f = box_function(c0, c1)
    assert membership_check(f, GRID_P, BOX)
    assert membership_check(apply_T(GRID_P, f), GRID_P, BOX)


@settings(max_examples=15)
@given(unit, unit, unit, unit)
def test_T_contracts_at_the_theoretical_rate(a0, a1, b0, b1):
    f, g = box_function(a0, a1), box_function(b0, b1)
    d = sup_distance(f, g)
    if d == 0:
        return
    rate = contraction_parameters(GRID_P).theoretical_rate
    assert sup_distance(apply_T(GRID_P, f), apply_T(GRID_P, g)) <= rate * d


def test_trivial_coupling_is_free():
    p = ModelParams.from_ratio(0.0, math.exp(6))
    f, rep = solve_fixed_point(p, n_grid=64)
    assert rep.iterations == 1 and rep.converged
    assert np.all(f.g0 == 1.0) and np.all(f.h1 == 1.0)


def test_solve_report_and_starting_points():
    f, rep = solve_fixed_point(GRID_P, grid=GRID)
    assert rep.converged and rep.certified and rep.rates_within_bound()
    assert rep.final_residual < rep.effective_tol
    assert len(rep.residuals) == rep.iterations
    upper = DressingFunctions(GRID, np.full(64, 1 + BOX.delta), np.full(64, 1 + BOX.epsilon))
    g, rep2 = solve_fixed_point(GRID_P, grid=GRID, initial=upper)
    assert rep2.converged
    assert sup_distance(f, g) <= 10 * max(rep.effective_tol, rep2.effective_tol)
    text = rep.to_text()
    assert "feasible: true" in text and "converged: true" in text
    assert all(": " in line for line in text.splitlines())


def test_iteration_cap():
    _, rep = solve_fixed_point(GRID_P, grid=GRID, max_iter=2, tol=1e-14)
    assert not rep.converged and rep.iterations == 2


def test_noncertified_mode_is_flagged(caplog):
    p = ModelParams.from_ratio(0.05, math.exp(10))
    with caplog.at_level(logging.WARNING, logger="dressqed.solver"):
        f, rep = solve_fixed_point(p, n_grid=64)
    assert not rep.certified and rep.converged
    assert "non-certified" in caplog.text


def test_singular_input():
    zero = DressingFunctions(GRID, np.zeros(64), np.zeros(64))
    with pytest.raises(SingularInputError):
        apply_T(GRID_P, zero)


def test_grid_checks():
    other = MomentumGrid.log_uniform(GRID_P.cutoff, 32, 1e-8)
    tmap = FixedPointMap(GRID_P, GRID)
    with pytest.raises(ValueError):
        tmap(DressingFunctions.free(other))
    with pytest.raises(ValueError):
        FixedPointMap(ModelParams(0.1, 3.0), GRID)
