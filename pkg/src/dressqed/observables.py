"""Renormalisation constants and theorem checks on a solved fixed point.

Z^{-1} = lim_{u->0+} g1(u)/u is obtained from the limiting kernel
K1(u, v) ~ (4/3) u/v, i.e.

    Z^{-1} = 1 + alpha/(2 pi) * 4/3 * int_0^Lambda g1(v) / (v E(v)) dv,

and cross-checked against a straight-line extrapolation of g1/u through the
smallest grid nodes.  The physical mass is m = Z g0(0+).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dressing import eval_dressing
from .quadrature import AccuracyWarning, grid_panel_rule

__all__ = [
    "WavefunctionRenorm",
    "MassTheoremVerdict",
    "Observables",
    "wavefunction_renorm",
    "g0_at_zero",
    "physical_mass",
    "verify_mass_theorem",
    "dispersion",
    "compute_observables",
]

Z_AGREEMENT = 1e-4
N_EXTRAP = 4


@dataclass(frozen=True)
class WavefunctionRenorm:
    Z_inv: float
    Z: float
    Z_inv_extrapolated: float

    @property
    def disagreement(self):
        return abs(self.Z_inv - self.Z_inv_extrapolated) / abs(self.Z_inv)


@dataclass(frozen=True)
class MassTheoremVerdict:
    """min over nodes of g0/m0 - g1/u, with the node where it is attained."""

    margin: float
    u_at_margin: float
    passed: bool
    degenerate: bool


@dataclass(frozen=True)
class Observables:
    Z_inv: float
    Z: float
    Z_inv_extrapolated: float
    g0_at_zero: float
    g0_at_zero_extrapolated: float
    m_phys: float
    m_over_m0: float
    theorem: MassTheoremVerdict
    dispersion: np.ndarray

    def items(self):
        return {
            "Z_inv": self.Z_inv,
            "Z": self.Z,
            "Z_inv_extrapolated": self.Z_inv_extrapolated,
            "Z_methods_rel_diff": abs(self.Z_inv - self.Z_inv_extrapolated) / self.Z_inv,
            "g0_at_zero": self.g0_at_zero,
            "g0_at_zero_extrapolated": self.g0_at_zero_extrapolated,
            "m_phys": self.m_phys,
            "m_over_m0": self.m_over_m0,
            "theorem_margin": self.theorem.margin,
            "theorem_margin_at_u": self.theorem.u_at_margin,
            "theorem_passed": self.theorem.passed,
            "theorem_degenerate": self.theorem.degenerate,
        }


def _require_massive(params):
    if params.m0 <= 0:
        raise ValueError("Z diverges for m0 = 0 (g1/u grows like log(1/u))")


def wavefunction_renorm(f, params, warn=True):
    """Z^{-1} from the limiting kernel, with the extrapolated value alongside.

    Warns with :class:`AccuracyWarning` if the two estimates differ by more
    than 1e-4 relative.
    """
    _require_massive(params)
    v, w = grid_panel_rule(f.grid)
    h0, h1 = f.interpolate(v)
    # g1/(v E) = h1 / sqrt(h0^2 + v^2 h1^2)
    integral = float(np.dot(w, h1 / np.hypot(h0, v * h1)))
    z_inv = 1.0 + params.alpha / (2 * math.pi) * (4.0 / 3.0) * integral

    k = min(N_EXTRAP, len(f.grid))
    if k >= 2:
        slope, intercept = np.polyfit(f.u[:k], f.h1[:k], 1)
        extrap = float(intercept)
    else:
        extrap = float(f.h1[0])

    out = WavefunctionRenorm(z_inv, 1.0 / z_inv, extrap)
    if warn and out.disagreement > Z_AGREEMENT:
        warnings.warn(
            f"Z extraction: limiting-kernel {z_inv:.10g} vs extrapolated "
            f"{extrap:.10g} (rel. diff {out.disagreement:.2e})",
            AccuracyWarning, stacklevel=2)
    return out


def g0_at_zero(f):
    """(constant extension h0[0], two-node linear extrapolation to u = 0)."""
    h0 = f.h0
    if len(f.grid) < 2:
        return float(h0[0]), float(h0[0])
    u0, u1 = f.u[0], f.u[1]
    extrap = h0[0] - u0 * (h0[1] - h0[0]) / (u1 - u0)
    return float(h0[0]), float(extrap)


def physical_mass(f, Z, params):
    """m = Z g0(0+)."""
    _require_massive(params)
    return Z * g0_at_zero(f)[0]


def verify_mass_theorem(f, params, atol=1e-12):
    """Check g0(u)/m0 > g1(u)/u at every node.

    For alpha = 0 both sides equal one; the verdict is then ``degenerate``
    and passes if the margin vanishes to ``atol``.
    """
    _require_massive(params)
    gap = f.h0 / params.m0 - f.h1
    i = int(np.argmin(gap))
    margin = float(gap[i])
    if params.alpha == 0:
        return MassTheoremVerdict(margin, float(f.u[i]), abs(margin) <= atol, True)
    return MassTheoremVerdict(margin, float(f.u[i]), margin > 0, False)


def dispersion(f, u):
    """E(u) = sqrt(g0(u)^2 + g1(u)^2)."""
    g0, g1 = eval_dressing(f, u)
    out = np.hypot(g0, g1)
    return float(out) if np.ndim(out) == 0 else out


def compute_observables(f, params, warn=True):
    z = wavefunction_renorm(f, params, warn=warn)
    g0z, g0x = g0_at_zero(f)
    m = z.Z * g0z
    return Observables(
        Z_inv=z.Z_inv, Z=z.Z, Z_inv_extrapolated=z.Z_inv_extrapolated,
        g0_at_zero=g0z, g0_at_zero_extrapolated=g0x,
        m_phys=m, m_over_m0=m / params.m0,
        theorem=verify_mass_theorem(f, params),
        dispersion=np.hypot(f.g0, f.g1),
    )
