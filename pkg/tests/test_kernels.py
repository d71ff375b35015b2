import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dressqed.kernels import (Channel, KernelDomainError, kernel_tail, legendre_q0,
                              legendre_q1, q0_from_excess, q1_from_excess, reduced_kernel)

mp.mp.dps = 40

log_excess = st.floats(min_value=-30, max_value=12)
log_mom = st.floats(min_value=-12, max_value=12)


def mp_q(c, w):
    """Q_c at z = 1 + w in 40-digit arithmetic."""
    w = mp.mpf(w)
    q0 = mp.log1p(2 / w) / 2
    return q0 if c == 0 else (1 + w) * q0 - 1


@given(log_excess)
def test_q0_matches_high_precision(lw):
    w = math.exp(lw)
    assert q0_from_excess(np.float64(w)) == pytest.approx(float(mp_q(0, w)), rel=1e-14)


@given(log_excess)
def test_q1_matches_high_precision(lw):
    w = math.exp(lw)
    got = float(q1_from_excess(np.atleast_1d(w))[0])
    assert got == pytest.approx(float(mp_q(1, w)), rel=1e-13)


@given(st.floats(min_value=1e-6, max_value=1e3))
def test_q1_recurrence(w):
    z = 1.0 + w
    q0, q1 = legendre_q0(z), legendre_q1(z)
    assert abs(q1 - (z * q0 - 1.0)) <= 1e-12 * z * q0


@given(st.floats(min_value=1.0 + 1e-9, max_value=1e8))
def test_q_positive_and_ordered(z):
    q0, q1 = legendre_q0(z), legendre_q1(z)
    assert q0 > 0 and q1 > 0
    # Q1 < Q0 since z Q0 - 1 < Q0 is equivalent to (z-1) Q0 < 1
    assert q1 < q0


@given(log_mom, log_mom, st.sampled_from(list(Channel)))
def test_kernel_symmetry(lu, lv, ch):
    u, v = math.exp(lu), math.exp(lv)
    if u == v:
        return
    a = u * u * reduced_kernel(ch, u, v)
    b = v * v * reduced_kernel(ch, v, u)
    assert a == pytest.approx(b, rel=1e-13)


@given(log_mom, st.floats(min_value=1e-8, max_value=0.5))
def test_gap_argument_consistent(lv, frac):
    v = math.exp(lv)
    u = v * (1 + frac)
    for ch in Channel:
        assert reduced_kernel(ch, u, v, gap=v * frac) == pytest.approx(
            reduced_kernel(ch, u, v), rel=1e-6)


def test_u_zero_limits():
    v = np.array([1e-3, 1.0, 1e3])
    assert np.all(reduced_kernel(Channel.SCALAR, 0.0, v) == 2.0)
    assert np.all(reduced_kernel(Channel.VECTOR, 0.0, v) == 0.0)
    # approached continuously
    assert reduced_kernel(Channel.SCALAR, 1e-9, 1.0) == pytest.approx(2.0, rel=1e-12)
    assert reduced_kernel(Channel.VECTOR, 1e-9, 1.0) == pytest.approx(
        4e-9 / 3, rel=1e-6)


def test_scalar_return_types():
    assert isinstance(legendre_q0(2.0), float)
    assert isinstance(reduced_kernel(Channel.SCALAR, 1.0, 2.0), float)
    assert reduced_kernel(Channel.VECTOR, [1.0, 2.0], 3.0).shape == (2,)


@pytest.mark.parametrize("bad", [1.0, 0.5, -2.0])
def test_legendre_domain(bad):
    with pytest.raises(KernelDomainError):
        legendre_q0(bad)
    with pytest.raises(KernelDomainError):
        legendre_q1(bad)


@pytest.mark.parametrize("u,v", [(1.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (1.0, -1.0)])
def test_kernel_domain(u, v):
    with pytest.raises(KernelDomainError):
        reduced_kernel(Channel.SCALAR, u, v)


@pytest.mark.parametrize("v", [10.0, 100.0, 1000.0])
def test_tail_expansion(v):
    exact = v * float(mp_q(1, (mp.mpf(v) + 1 / mp.mpf(v)) / 2 - 1))
    assert abs(exact - kernel_tail(v)) <= v ** -5
    # the next term is (12/35) v^-5
    assert (exact - kernel_tail(v)) * v**5 == pytest.approx(12 / 35, rel=0.05)


def test_tail_domain():
    with pytest.raises(KernelDomainError):
        kernel_tail(1.0)
