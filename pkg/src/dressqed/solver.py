"""The fixed-point map T and its Banach iteration.

    T0(g)(u) = m0 + alpha/(2 pi) int_0^Lambda K0(u, v) g0(v)/E(v) dv
    T1(g)(u) = u  + alpha/(2 pi) int_0^Lambda K1(u, v) g1(v)/E(v) dv

with E = sqrt(g0^2 + g1^2).  Internally the iteration carries only the
correction terms c0 = g0 - m0 and c1 = g1/u - 1; they are small compared to
g itself, so residuals between iterates are not swamped by the rounding of
u ~ Lambda.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .dressing import BoundsBox, DressingFunctions, MomentumGrid
from .kernels import Channel
from .quadrature import GridQuadrature

__all__ = [
    "SingularInputError",
    "ContractionData",
    "SolveReport",
    "FixedPointMap",
    "contraction_parameters",
    "certified_box",
    "apply_T",
    "solve_fixed_point",
    "envelope_bounds",
]

log = logging.getLogger(__name__)

FEASIBILITY_LIMIT = 1.0 / 7.0
EPS = np.finfo(float).eps
# convergence is declared no finer than this many ulps of the correction scale
NOISE_ULPS = 64.0
# consecutive-residual ratios are only formed above this multiple of the floor
RATE_FLOOR_FACTOR = 1e3


class SingularInputError(ValueError):
    """sqrt(g0^2 + g1^2) vanished somewhere in the integration range."""


@dataclass(frozen=True)
class ContractionData:
    """Contraction bookkeeping for a given (alpha, Lambda/m0)."""

    Y: float
    epsilon: float
    delta: float
    theoretical_rate: float
    feasible: bool
    alpha: float = 0.0

    @property
    def lambda_over_m0_at_threshold(self):
        """Lambda/m0 at which Y reaches 1/7 for this alpha."""
        if self.alpha == 0:
            return math.inf
        x = math.pi * FEASIBILITY_LIMIT / self.alpha
        return math.sinh(x) if x < 700 else math.inf

    @property
    def log_lambda_over_m0_at_threshold(self):
        if self.alpha == 0:
            return math.inf
        x = math.pi * FEASIBILITY_LIMIT / self.alpha
        # log(sinh x) without overflow
        return x + math.log1p(-math.exp(-2 * x)) - math.log(2.0)


def contraction_parameters(params):
    """Y = alpha arsinh(Lambda/m0)/pi and the box/rate derived from it."""
    if params.m0 <= 0:
        raise ValueError("contraction parameters need m0 > 0 (use the massless module)")
    Y = params.alpha * math.asinh(params.cutoff / params.m0) / math.pi
    eps = 50 * Y / (9 - 50 * Y) if 50 * Y < 9 else math.inf
    delta = Y / (1 - Y) if Y < 1 else math.inf
    rate = (2 + eps + delta) * Y
    return ContractionData(Y, eps, delta, rate, Y < FEASIBILITY_LIMIT, params.alpha)


def certified_box(cdata):
    return BoundsBox(cdata.epsilon, cdata.delta)


def envelope_bounds(params, cdata=None):
    """Upper envelopes (g0_max, g1_max/u) that hold on the invariant box."""
    cdata = cdata or contraction_parameters(params)
    ash = math.asinh(params.cutoff / params.m0)
    g0_max = params.m0 * (1 + params.alpha / math.pi * (1 + cdata.delta) * ash)
    h1_max = 1 + 50 * params.alpha / (9 * math.pi) * (1 + cdata.epsilon) * ash
    return g0_max, h1_max


_QUAD_CACHE = {}


def _quadrature_for(grid):
    key = (len(grid), grid.nodes[0], grid.nodes[-1], hash(grid.nodes.tobytes()))
    quad = _QUAD_CACHE.get(key)
    if quad is None:
        if len(_QUAD_CACHE) >= 4:
            _QUAD_CACHE.pop(next(iter(_QUAD_CACHE)))
        quad = GridQuadrature(grid)
        _QUAD_CACHE[key] = quad
    return quad


class FixedPointMap:
    """T for fixed parameters on a fixed grid.

    Parameters
    ----------
    params : ModelParams
    grid : MomentumGrid
        Last node must equal the cutoff.
    quadrature : GridQuadrature, optional
        Reused across calls; built (and cached per grid) when omitted.
    """

    def __init__(self, params, grid, quadrature=None):
        if not math.isclose(grid.cutoff, params.cutoff, rel_tol=1e-12):
            raise ValueError("grid must end at the cutoff")
        self.params = params
        self.grid = grid
        self.quad = quadrature if quadrature is not None else _quadrature_for(grid)
        self._logu = grid.log_nodes
        self._shared_logv = np.log(self.quad.shared_v)
        self._local_logv = np.log(self.quad.local_v)

    def _ratios(self, h0, h1, logv, v):
        g0 = np.interp(logv, self._logu, h0)
        g1 = v * np.interp(logv, self._logu, h1)
        e = np.hypot(g0, g1)
        if not np.all(e > 0):
            bad = v.ravel()[np.argmin(e.ravel())]
            raise SingularInputError(f"sqrt(g0^2 + g1^2) = 0 at v = {bad!r}")
        return g0 / e, g1 / e

    def corrections(self, h0, h1):
        """(T0 - m0, T1/u - 1) on the grid for samples (h0, h1)."""
        q = self.quad
        s0, s1 = self._ratios(h0, h1, self._shared_logv, q.shared_v)
        l0, l1 = self._ratios(h0, h1, self._local_logv, q.local_v)
        pref = self.params.alpha / (2 * math.pi)
        c0 = pref * q.integrate(Channel.SCALAR, s0, l0)
        c1 = pref * q.integrate(Channel.VECTOR, s1, l1) / self.grid.nodes
        return c0, c1

    def __call__(self, f):
        if not f.grid.same_as(self.grid):
            raise ValueError("dressing functions live on a different grid")
        c0, c1 = self.corrections(f.h0, f.h1)
        return DressingFunctions(self.grid, self.params.m0 + c0, 1.0 + c1)


def apply_T(params, f, quadrature=None):
    """One application of the fixed-point map, sampled on ``f``'s grid."""
    return FixedPointMap(params, f.grid, quadrature)(f)


@dataclass
class SolveReport:
    iterations: int
    residuals: list
    measured_rates: list
    contraction: ContractionData | None
    converged: bool
    final_residual: float
    tol: float = 0.0
    effective_tol: float = 0.0
    rate_floor: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.contraction is not None and self.contraction.feasible

    @property
    def max_measured_rate(self):
        return max(self.measured_rates) if self.measured_rates else 0.0

    def rates_within_bound(self):
        if self.contraction is None:
            return False
        return all(r <= self.contraction.theoretical_rate for r in self.measured_rates)

    def items(self):
        c = self.contraction
        out = {}
        if c is not None:
            out.update(
                Y=c.Y, epsilon=c.epsilon, delta=c.delta,
                theoretical_rate=c.theoretical_rate, feasible=c.feasible,
                certified=self.certified,
                lambda_over_m0_at_Y_one_seventh=c.lambda_over_m0_at_threshold,
                log_lambda_over_m0_at_Y_one_seventh=c.log_lambda_over_m0_at_threshold,
            )
        out.update(
            iterations=self.iterations, final_residual=self.final_residual,
            converged=self.converged, tol=self.tol, effective_tol=self.effective_tol,
            max_measured_rate=self.max_measured_rate,
            rates_within_bound=self.rates_within_bound(),
        )
        out.update(self.extras)
        return out

    def to_text(self):
        return "".join(f"{k}: {_fmt(v)}\n" for k, v in self.items().items())


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def solve_fixed_point(params, tol=1e-10, max_iter=200, grid=None, initial=None,
                      n_grid=512, u_min_ratio=1e-8, quadrature=None):
    """Banach iteration g <- T(g) from the lower corner (m0, u) of the box.

    Iteration stops once sup_distance(T(g), g) drops below ``tol`` or below
    the rounding floor of the correction terms (``NOISE_ULPS`` ulps of their
    sup), whichever is larger.  Outside the certified region (Y >= 1/7) the
    iteration still runs; the report then has ``certified = False``.

    Returns
    -------
    (DressingFunctions, SolveReport)
        The last image T(g) and the iteration record.  ``converged`` is False
        if ``max_iter`` was exhausted.
    """
    if params.m0 <= 0:
        raise ValueError("solve_fixed_point needs m0 > 0")
    cdata = contraction_parameters(params)
    if grid is None:
        grid = MomentumGrid.log_uniform(params.cutoff, n_grid, u_min_ratio)
    tmap = FixedPointMap(params, grid, quadrature)
    if not cdata.feasible:
        log.warning("Y = %.4g >= 1/7: running in non-certified mode", cdata.Y)

    u = grid.nodes
    if initial is None:
        c0 = np.zeros(len(grid))
        c1 = np.zeros(len(grid))
    else:
        c0 = initial.h0 - params.m0
        c1 = initial.h1 - 1.0

    residuals, rates = [], []
    converged = False
    eff_tol = tol
    rate_floor = 0.0
    it = 0
    while it < max_iter:
        it += 1
        n0, n1 = tmap.corrections(params.m0 + c0, 1.0 + c1)
        res = float(np.max(np.abs(n0 - c0) + u * np.abs(n1 - c1)))
        scale = float(np.max(np.abs(n0) + u * np.abs(n1)))
        noise = NOISE_ULPS * EPS * scale
        eff_tol = max(tol, noise)
        rate_floor = RATE_FLOOR_FACTOR * noise
        if residuals and residuals[-1] > rate_floor:
            rates.append(res / residuals[-1])
        residuals.append(res)
        c0, c1 = n0, n1
        log.debug("iteration %d: residual %.3e", it, res)
        if res < eff_tol:
            converged = True
            break

    f = DressingFunctions(grid, params.m0 + c0, 1.0 + c1)
    report = SolveReport(
        iterations=it, residuals=residuals, measured_rates=rates,
        contraction=cdata, converged=converged,
        final_residual=residuals[-1] if residuals else 0.0,
        tol=tol, effective_tol=eff_tol, rate_floor=rate_floor,
    )
    return f, report
