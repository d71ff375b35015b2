"""Independent check of the angular reduction.

Evaluates the original three-dimensional right-hand sides

    m0 + alpha/(4 pi^2) int_{|q|<Lambda} dq |p-q|^-2 g0(|q|)/E(|q|)
    |p| + alpha/(4 pi^2) int_{|q|<Lambda} dq (w_p . w_q) |p-q|^-2 g1(|q|)/E(|q|)

directly: the azimuth gives 2 pi, the polar integral

    A_k(u, v) = int_{-1}^{1} c^k dc / (u^2 + v^2 - 2 u v c),   k = 0, 1

is done numerically after the substitution s = log(u^2 + v^2 - 2 u v c),
which removes the near-singularity at c = 1, and the radial integral is done
with Gauss-Legendre away from |q| = |p| and adaptive QUADPACK next to it.
Nothing here uses the Legendre-function kernels.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .kernels import Channel
from .quadrature import AccuracyWarning, integrate_singular

__all__ = [
    "polar_integral",
    "direct_3d_rhs",
    "reduced_rhs",
    "offgrid_agreement",
]

# piece boundaries in sigma = s_max - s; the exponential in c(sigma) is
# resolved to machine precision by 24-point Gauss on each piece
_SIGMA_EDGES = np.array([0.0, 2.0, 6.0, 14.0, 30.0, 62.0])
_N_POLAR = 24
_N_RADIAL = 20
_GX, _GW = np.polynomial.legendre.leggauss(_N_POLAR)
_RX, _RW = np.polynomial.legendre.leggauss(_N_RADIAL)


def polar_integral(u, v, k):
    """A_k(u, v) for k in {0, 1}, vectorised over v; v = u gives 0."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    b = 2.0 * u * v
    ok = (v != u) & (b > 0)
    out = np.zeros_like(v)
    if not ok.any():
        return out
    vv, bb = v[ok], b[ok]
    # s_max - s_min = 2 log((u+v)/|u-v|)
    span = 2.0 * np.log1p(2.0 * np.minimum(u, vv) / np.abs(u - vv))
    if k == 0:
        out[ok] = span / bb
        return out
    top = (u + vv) ** 2
    lo = np.minimum(_SIGMA_EDGES[None, :], span[:, None])
    hi = np.append(lo[:, 1:], span[:, None], axis=1)
    half = 0.5 * (hi - lo)
    sig = 0.5 * (hi + lo)[:, :, None] + half[:, :, None] * _GX[None, None, :]
    # c = -1 - (u+v)^2 expm1(-sigma) / (2uv)
    c = -1.0 - top[:, None, None] * np.expm1(-sig) / bb[:, None, None]
    out[ok] = np.einsum("ijk,k,ij->i", c, _GW, half) / bb
    return out


def _integrand(channel, f, u):
    k = 0 if channel is Channel.SCALAR else 1

    def radial(v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        h0, h1 = f.interpolate(v)
        g0, g1 = h0, v * h1
        ratio = (g0, g1)[k] / np.hypot(g0, g1)
        return v * v * ratio * polar_integral(u, v, k)

    return radial


def direct_3d_rhs(channel, f, u, params, rtol=1e-11):
    """Right-hand side of the unreduced equation for ``channel`` at |p| = u.

    Parameters
    ----------
    channel : Channel
    f : DressingFunctions
        Current (g0, g1), interpolated between nodes.
    u : float
        0 < u < cutoff.
    params : ModelParams
    rtol : float
        Relative target for the adaptive radial pieces next to u; failure
        to reach it issues an :class:`AccuracyWarning`.
    """
    channel = Channel(channel)
    lam = params.cutoff
    if not 0 < u < lam:
        raise ValueError(f"u must lie in (0, {lam})")
    base = params.m0 if channel is Channel.SCALAR else u
    if params.alpha == 0:
        return float(base)

    radial = _integrand(channel, f, u)
    edges = np.unique(np.concatenate(([0.0], f.grid.nodes[f.grid.nodes < lam], [u, lam])))
    a, b = edges[:-1], edges[1:]
    width = b - a
    dist = np.where(u < a, a - u, np.where(u > b, u - b, 0.0))
    near = dist < width

    total = 0.0
    # far panels: Gauss in log v, the first one (from 0) in v
    far = ~near
    fa, fb = a[far], b[far]
    lin = fa == 0.0
    if lin.any():
        la, lb = fa[lin], fb[lin]
        vv = 0.5 * (la + lb)[:, None] + 0.5 * (lb - la)[:, None] * _RX[None, :]
        vals = radial(vv.ravel()).reshape(vv.shape)
        total += float(np.sum(vals * _RW[None, :] * 0.5 * (lb - la)[:, None]))
    lg = ~lin
    if lg.any():
        sa, sb = np.log(fa[lg]), np.log(fb[lg])
        ss = 0.5 * (sa + sb)[:, None] + 0.5 * (sb - sa)[:, None] * _RX[None, :]
        vv = np.exp(ss)
        vals = radial(vv.ravel()).reshape(vv.shape) * vv
        total += float(np.sum(vals * _RW[None, :] * 0.5 * (sb - sa)[:, None]))

    for lo, hi in zip(a[near], b[near]):
        out = integrate.quad(lambda x: float(radial(x)[0]), lo, hi,
                             epsabs=0.0, epsrel=rtol, limit=400, full_output=1)
        if len(out) > 3:
            warnings.warn(f"radial quadrature near |q| = |p| = {u:g}: {out[3]}",
                          AccuracyWarning, stacklevel=2)
        total += out[0]
    return float(base + params.alpha / (2 * math.pi) * total)


def reduced_rhs(channel, f, u, params, tol=1e-13):
    """The same right-hand side through the angle-integrated kernels."""
    channel = Channel(channel)
    base = params.m0 if channel is Channel.SCALAR else u
    if params.alpha == 0:
        return float(base)
    idx = 0 if channel is Channel.SCALAR else 1

    def w(v):
        h0, h1 = f.interpolate(v)
        g0, g1 = h0, v * h1
        return (g0, g1)[idx] / np.hypot(g0, g1)

    val = integrate_singular(channel, u, w, params, tol=tol, breakpoints=f.grid.nodes)
    return float(base + params.alpha / (2 * math.pi) * val)


def offgrid_agreement(f, params, us):
    """Largest relative gap between the interpolated fixed point and the
    unreduced right-hand side at momenta ``us`` (typically between nodes).

    Returns
    -------
    (float, list of tuple)
        The maximum relative difference and per-point
        ``(u, channel, interpolated, direct)`` rows.
    """
    rows = []
    worst = 0.0
    for u in us:
        g0, g1 = f.interpolate(np.array([u]))
        interp = {Channel.SCALAR: float(g0[0]), Channel.VECTOR: float(u * g1[0])}
        for ch in Channel:
            d = direct_3d_rhs(ch, f, u, params)
            rel = abs(interp[ch] - d) / abs(d)
            worst = max(worst, rel)
            rows.append((float(u), ch.name.lower(), interp[ch], d))
    return worst, rows
