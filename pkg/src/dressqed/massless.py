"""Zero bare mass: g0 = 0 and g1 in closed form.

With g0 = 0 the integrand g1/|g1| is identically one, so a single
integration gives

    g1(u) = u + (alpha/2pi) u B(Lambda/u),
    B(x)  = 2/3 log|x^2 - 1| - x^2/3 + x/6 log|(x+1)/(x-1)| (3 + x^2).

For large x the x^2 terms cancel against the logarithm; B is then summed
from its series B(x) = 4/3 log x + 2/3 log(1 - x^-2)
+ sum_k x^-2k [1/(2k+1) + 1/(3(2k+3))].
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["massless_bracket", "massless_g1", "massless_asymptote"]

_SERIES_FROM = 2.0
_K = np.arange(40)
_COEFFS = 1.0 / (2 * _K + 1) + 1.0 / (3 * (2 * _K + 3))


def massless_bracket(x):
    """B(x) for x >= 1; B(1) is the finite limit 4/3 log 2 - 1/3."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1):
        raise ValueError("massless bracket needs x = cutoff/u >= 1")
    out = np.empty(x.shape)

    far = x >= _SERIES_FROM
    xf = x[far]
    y2 = 1.0 / (xf * xf)
    acc = np.zeros_like(xf)
    for c in _COEFFS[::-1]:
        acc = acc * y2 + c
    out[far] = (4.0 / 3.0) * np.log(xf) + (2.0 / 3.0) * np.log1p(-y2) + acc

    xn = x[~far]
    # the log|x - 1| pieces combine into (x-1)(x^2+x+4)/6 log(x-1) -> 0
    dm = xn - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(dm > 0, dm * (xn * xn + xn + 4.0) / 6.0 * np.log(dm), 0.0)
    out[~far] = (2.0 / 3.0 + xn * (3.0 + xn * xn) / 6.0) * np.log1p(xn) - xn * xn / 3.0 - tail
    return float(out) if out.ndim == 0 else out


def massless_g1(u, params):
    """Closed-form g1(u) for m0 = 0 and 0 < u <= cutoff.

    At u = cutoff the bracket has a removable singularity and its limit is
    returned.
    """
    if params.m0 != 0:
        raise ValueError("massless_g1 requires m0 = 0")
    u = np.asarray(u, dtype=float)
    lam = params.cutoff
    if np.any(u <= 0) or np.any(u > lam):
        raise ValueError(f"massless_g1 needs 0 < u <= {lam}")
    out = u + params.alpha / (2 * math.pi) * u * massless_bracket(lam / u)
    return float(out) if out.ndim == 0 else out


def massless_asymptote(u, params):
    """Small-u form u + (2 alpha / 3 pi) u log(cutoff/u).

    Only meaningful for u << cutoff; at u = cutoff the correction vanishes.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("massless_asymptote needs u > 0")
    out = u + 2 * params.alpha / (3 * math.pi) * u * np.log(params.cutoff / u)
    return float(out) if out.ndim == 0 else out
