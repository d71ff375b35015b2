import math
import warnings

import numpy as np
import pytest

from dressqed import (AccuracyWarning, DressingFunctions, ModelParams, MomentumGrid,
                      compute_observables, physical_mass, solve_fixed_point,
                      verify_mass_theorem, wavefunction_renorm)
from dressqed.observables import dispersion, g0_at_zero

P = ModelParams.from_ratio(1 / 137, math.exp(8))


@pytest.fixture(scope="module")
def solved():
    return solve_fixed_point(P, n_grid=256)[0]


def test_renormalisation_constants(solved):
    z = wavefunction_renorm(solved, P)
    assert z.Z_inv > 1 and z.Z == pytest.approx(1 / z.Z_inv)
    assert z.disagreement < 1e-6
    m = physical_mass(solved, z.Z, P)
    assert m > P.m0


def test_mass_theorem_margin_positive(solved):
    v = verify_mass_theorem(solved, P)
    assert v.passed and not v.degenerate and v.margin > 0
    assert v.u_at_margin in solved.u


def test_mass_theorem_detects_violation():
    grid = MomentumGrid.log_uniform(P.cutoff, 16, 1e-8)
    f = DressingFunctions(grid, np.ones(16), np.full(16, 1.01))
    assert not verify_mass_theorem(f, P).passed


def test_trivial_limit():
    p = ModelParams.from_ratio(0.0, math.exp(8))
    f, _ = solve_fixed_point(p, n_grid=32)
    obs = compute_observables(f, p)
    assert obs.Z == 1 and obs.m_over_m0 == 1
    assert obs.theorem.degenerate and obs.theorem.passed
    assert np.array_equal(obs.dispersion, np.hypot(1.0, f.u))


def test_extrapolations_close_to_node_values(solved):
    g0z, g0x = g0_at_zero(solved)
    assert g0x == pytest.approx(g0z, rel=1e-8)
    assert dispersion(solved, solved.u[5]) == pytest.approx(
        math.hypot(solved.g0[5], solved.g1[5]), rel=1e-15)


def test_disagreement_warns():
    grid = MomentumGrid.log_uniform(P.cutoff, 16, 1e-8)
    f = DressingFunctions(grid, np.ones(16), np.linspace(1.5, 1.0, 16))
    with pytest.warns(AccuracyWarning):
        wavefunction_renorm(f, P)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        wavefunction_renorm(f, P, warn=False)


def test_massless_rejected():
    grid = MomentumGrid.log_uniform(1.0, 8, 1e-4)
    with pytest.raises(ValueError):
        wavefunction_renorm(DressingFunctions.free(grid, 0.0), ModelParams(0.1, 1.0, 0.0))
