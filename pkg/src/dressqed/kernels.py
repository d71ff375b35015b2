"""Legendre functions of the second kind and the angle-integrated kernels.

After the angular integration the two dressing equations carry the kernels

    K_c(u, v) = (v/u) Q_c(z),   z = (u/v + v/u) / 2,   c in {0, 1}

with Q0(z) = 1/2 log((z+1)/(z-1)) and Q1(z) = z Q0(z) - 1.  Everything here
is vectorised over numpy arrays.  The diagonal u = v (z = 1) carries an
integrable logarithmic singularity; callers that sample close to it should
pass the gap |u - v| explicitly so that z - 1 is formed without cancellation.
"""

from __future__ import annotations

import enum

import numpy as np

__all__ = [
    "Channel",
    "KernelDomainError",
    "legendre_q0",
    "legendre_q1",
    "q0_from_excess",
    "q1_from_excess",
    "reduced_kernel",
    "kernel_tail",
]


class Channel(enum.Enum):
    """Which dressing equation a kernel belongs to."""

    SCALAR = 0  # Q0, mass-like component g0
    VECTOR = 1  # Q1, momentum-like component g1


class KernelDomainError(ValueError):
    """Argument outside the domain where the kernel is defined."""


# Q1(z) = sum_{k>=1} z^{-2k} / (2k + 1) for z > 1.  At z >= 2 thirty terms
# reach 4^-30 ~ 1e-18, below double-precision resolution.
_SERIES_SWITCH = 2.0
_N_SERIES = 30
_SERIES_COEFFS = 1.0 / (2.0 * np.arange(1, _N_SERIES + 1) + 1.0)


def _q1_series(y2):
    # Horner in y2 = 1/z^2
    acc = np.zeros_like(y2)
    for c in _SERIES_COEFFS[::-1]:
        acc = (acc + c) * y2
    return acc


def q0_from_excess(w):
    """Q0 evaluated at z = 1 + w for w > 0.

    Writing (z+1)/(z-1) = 1 + 2/w keeps full relative accuracy both near the
    diagonal (w -> 0) and far from it (w -> inf).
    """
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore"):
        return 0.5 * np.log1p(2.0 / w)


def q1_from_excess(w):
    """Q1 evaluated at z = 1 + w for w > 0."""
    w = np.asarray(w, dtype=float)
    z = 1.0 + w
    far = z >= _SERIES_SWITCH
    out = np.empty_like(z)
    zf = z[far]
    out[far] = _q1_series(1.0 / (zf * zf))
    near = ~far
    out[near] = z[near] * q0_from_excess(w[near]) - 1.0
    return out


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 1.0)):
        raise KernelDomainError("Legendre Q_c(z) requires z > 1")
    return z


def legendre_q0(z):
    """Q0(z) = 1/2 log((z+1)/(z-1)) for z > 1.

    Parameters
    ----------
    z : float or array_like
        Argument, strictly greater than one.

    Returns
    -------
    float or ndarray
    """
    z = _check_z(z)
    out = q0_from_excess(z - 1.0)
    return float(out) if out.ndim == 0 else out


def legendre_q1(z):
    """Q1(z) = z Q0(z) - 1 for z > 1, accurate also for large z."""
    z = _check_z(z)
    out = q1_from_excess(np.atleast_1d(z - 1.0)).reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def reduced_kernel(channel, u, v, gap=None):
    """Angle-integrated kernel K_c(u, v) = (v/u) Q_c((u/v + v/u)/2).

    ``u = 0`` is read as the limit u -> 0+: 2 for the scalar channel and 0
    for the vector channel (whose slope is 4/(3v)).

    Parameters
    ----------
    channel : Channel
    u : float or array_like
        Outer momentum, u >= 0.
    v : float or array_like
        Integration momentum, v > 0.
    gap : array_like, optional
        |u - v| computed by the caller without cancellation.  Quadrature
        rules clustering nodes at the diagonal supply it.

    Raises
    ------
    KernelDomainError
        On u = v, v <= 0 or u < 0.
    """
    channel = Channel(channel)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if np.any(v <= 0.0) or np.any(u < 0.0):
        raise KernelDomainError("reduced kernel requires u >= 0 and v > 0")
    d = np.abs(u - v) if gap is None else np.broadcast_to(np.asarray(gap, dtype=float), u.shape)
    if np.any(d == 0.0):
        raise KernelDomainError("reduced kernel is singular on the diagonal u = v")

    out = np.empty(u.shape)
    zero = u == 0.0
    out[zero] = 2.0 if channel is Channel.SCALAR else 0.0
    pos = ~zero
    up, vp, dp = u[pos], v[pos], d[pos]
    excess = dp * dp / (2.0 * up * vp)
    q = q0_from_excess(excess) if channel is Channel.SCALAR else q1_from_excess(excess)
    out[pos] = (vp / up) * q
    return float(out) if out.ndim == 0 else out


def kernel_tail(v):
    """Two-term large-v expansion of v Q1((1/v + v)/2): 4/(3v) + 8/(15 v^3).

    The truncation error is about (12/35) v^-5; at v = 2 the relative error
    is already below 1%, closer to v = 1 the exact function diverges
    logarithmically and the expansion is meaningless.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v <= 1.0):
        raise KernelDomainError("kernel_tail requires v > 1")
    out = 4.0 / (3.0 * v) + 8.0 / (15.0 * v**3)
    return float(out) if out.ndim == 0 else out
