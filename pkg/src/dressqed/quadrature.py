"""Quadrature of kernel-weighted integrands over [0, cutoff].

The kernels K_c(u, v) have an integrable logarithmic singularity at v = u.
Panels are cut so that the singular point always sits on a panel edge and
every panel is integrated with a tanh-sinh (double exponential) rule, which
converges fast for endpoint log singularities.  Panels spanning many decades
are integrated in log v.

Two entry points:

* :func:`integrate_singular`: adaptive, for an arbitrary vectorised
  integrand and arbitrary u.
* :class:`GridQuadrature`: a fixed rule precomputed for all nodes of a
  momentum grid, used by the fixed-point map.  Panels follow the grid so that
  piecewise-linear interpolants are smooth inside each panel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernels import Channel, reduced_kernel

__all__ = [
    "AccuracyWarning",
    "IntegrandError",
    "QuadInfo",
    "tanh_sinh_rule",
    "integrate_singular",
    "GridQuadrature",
    "grid_panel_rule",
]

PANEL_FRACTION = 0.5
T_MAX = 4.0
# panels with b/a above this are mapped to log v
LOG_MAP_RATIO = 4.0
# [0, b] panels are split at b * ZERO_SPLIT so the remainder can be log-mapped
ZERO_SPLIT = 1e-6
# log-mapped panels are cut into pieces at most this many e-folds wide
LOG_PIECE = 2.0


class AccuracyWarning(RuntimeWarning):
    """Requested accuracy not reached within the node budget."""


class IntegrandError(ValueError):
    """The integrand returned a non-finite value."""

    def __init__(self, v):
        self.v = float(v)
        super().__init__(f"integrand is not finite at v = {self.v!r}")


@lru_cache(maxsize=16)
def tanh_sinh_rule(h, t_max=T_MAX):
    """Tanh-sinh abscissae on [-1, 1].

    Returns ``(x, weights, one_plus_x, one_minus_x)``; the last two are the
    distances to the endpoints, computed without cancellation.
    """
    k = int(round(t_max / h))
    t = h * np.arange(-k, k + 1)
    y = 0.5 * math.pi * np.sinh(t)
    x = np.tanh(y)
    w = h * 0.5 * math.pi * np.cosh(t) / np.cosh(y) ** 2
    # 1 - tanh(y) = 2 / (1 + e^{2y})
    with np.errstate(over="ignore"):
        one_minus = 2.0 / (1.0 + np.exp(2.0 * y))
        one_plus = 2.0 / (1.0 + np.exp(-2.0 * y))
    for arr in (x, w, one_plus, one_minus):
        arr.setflags(write=False)
    return x, w, one_plus, one_minus


@lru_cache(maxsize=16)
def _gauss_rule(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _map_panel(a, b, rule, log_map):
    """Nodes, weights and endpoint distances of ``rule`` mapped onto [a, b]."""
    x, w, dl, dr = rule
    if log_map:
        la, lb = math.log(a), math.log(b)
        half = 0.5 * (lb - la)
        s = la + half * dl
        v = np.exp(s)
        wts = half * w * v
        da = a * np.expm1(half * dl)
        db = b * -np.expm1(-half * dr)
    else:
        half = 0.5 * (b - a)
        da = half * dl
        db = half * dr
        v = np.where(dl <= dr, a + da, b - db)
        wts = half * w
    return v, wts, da, db


@dataclass
class QuadInfo:
    """Diagnostics returned by ``integrate_singular(..., full_output=True)``."""

    error: float
    n_evals: int
    level: int
    converged: bool
    panels: list


def _cuts(u, cutoff, breakpoints):
    cuts = {0.0, cutoff}
    if 0 < u < cutoff:
        cuts |= {u, u * (1 - PANEL_FRACTION)}
        if u * (1 + PANEL_FRACTION) < cutoff:
            cuts.add(u * (1 + PANEL_FRACTION))
    elif u == cutoff:
        cuts.add(cutoff * (1 - PANEL_FRACTION))
    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float)
        cuts |= set(bp[(bp > 0) & (bp < cutoff)].tolist())
    cuts = sorted(cuts)
    panels = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if a == 0.0 and b != u:
            # keep a short linear piece at the origin and log-map the rest
            panels.append((0.0, b * ZERO_SPLIT, False))
            panels.extend(_log_pieces(b * ZERO_SPLIT, b))
        elif a > 0 and b / a > LOG_MAP_RATIO:
            panels.extend(_log_pieces(a, b))
        else:
            panels.append((a, b, False))
    return panels


def _log_pieces(a, b):
    n = max(1, math.ceil(math.log(b / a) / LOG_PIECE))
    edges = a * np.exp(np.linspace(0.0, math.log(b / a), n + 1))
    edges[0], edges[-1] = a, b
    return [(float(lo), float(hi), True) for lo, hi in zip(edges[:-1], edges[1:])]


def _panel_points(channel, u, panels, rule):
    vs, ws = [], []
    for a, b, log_map in panels:
        v, wts, da, db = _map_panel(a, b, rule, log_map)
        if a == u:
            gap = da
        elif b == u:
            gap = db
        else:
            gap = np.abs(v - u)
        keep = (wts > 0) & (v > 0) & (gap > 0)
        k = reduced_kernel(channel, np.full(keep.sum(), u), v[keep], gap=gap[keep])
        vs.append(v[keep])
        ws.append(wts[keep] * k)
    return np.concatenate(vs), np.concatenate(ws)


def integrate_singular(channel, u, w, params, tol=1e-10, breakpoints=None,
                       max_nodes=200, full_output=False):
    """Integrate K_c(u, v) w(v) over v in [0, cutoff].

    Parameters
    ----------
    channel : Channel
    u : float
        Outer momentum in [0, cutoff]; u = 0 uses the limiting kernel.
    w : callable
        Side-effect free, vectorised integrand: called with a 1-D array of
        v in (0, cutoff], must return an array of the same shape.
    params : ModelParams
        Supplies the cutoff.
    tol : float
        Target absolute accuracy.  The rule is refined by halving the
        tanh-sinh step until two successive levels agree to ``tol``.
    breakpoints : array_like, optional
        Extra panel edges, e.g. the nodes of a piecewise-linear integrand.
    max_nodes : int
        Node budget per panel.  If exhausted, an :class:`AccuracyWarning`
        is issued and the last estimate returned.
    full_output : bool
        Also return a :class:`QuadInfo`.
    """
    channel = Channel(channel)
    cutoff = float(params.cutoff)
    if not 0.0 <= u <= cutoff:
        raise ValueError(f"u = {u} outside [0, {cutoff}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    panels = _cuts(float(u), cutoff, breakpoints)

    prev = None
    n_evals = 0
    level = 0
    value = err = math.nan
    converged = False
    while True:
        level += 1
        h = 2.0 ** -level
        if 2 * round(T_MAX / h) + 1 > max_nodes and prev is not None:
            break
        v, wk = _panel_points(channel, u, panels, tanh_sinh_rule(h))
        fv = np.asarray(w(v), dtype=float)
        if fv.shape != v.shape:
            fv = np.broadcast_to(fv, v.shape)
        bad = ~np.isfinite(fv)
        if bad.any():
            raise IntegrandError(v[np.argmax(bad)])
        n_evals += v.size
        value = float(np.dot(wk, fv))
        if prev is not None:
            err = abs(value - prev)
            if err <= tol:
                converged = True
                break
        prev = value

    if not converged:
        warnings.warn(
            f"integrate_singular: tolerance {tol:g} not reached at u={u:g} "
            f"(last change {err:.3g})", AccuracyWarning, stacklevel=2)
    if full_output:
        return value, QuadInfo(err, n_evals, level, converged, panels)
    return value


def _edges_below(nodes, depth=1e-6):
    """Panel edges below the first node, graded so that no panel is wider
    than its distance to nodes[0]: u0/q, u0/q^2, u0/q^4, ... down to
    u0 * depth, with q the first grid ratio."""
    u0 = nodes[0]
    q = nodes[1] / nodes[0] if nodes.size > 1 else 2.0
    out = []
    k = 1
    while True:
        e = u0 * q ** -k
        out.append(e)
        if e <= u0 * depth:
            break
        k *= 2
    return np.array(out[::-1])


def grid_panel_edges(nodes):
    return np.concatenate(([0.0], _edges_below(nodes), nodes))


def grid_panel_rule(grid, n_gauss=10):
    """Gauss-Legendre abscissae and weights for plain integrals over
    [0, cutoff] of functions that are smooth between grid nodes."""
    edges = grid_panel_edges(grid.nodes)
    a, b = edges[:-1], edges[1:]
    gx, gw = _gauss_rule(n_gauss)
    half = 0.5 * (b - a)
    v = 0.5 * (b + a)[:, None] + half[:, None] * gx[None, :]
    return v.ravel(), (half[:, None] * gw[None, :]).ravel()


class GridQuadrature:
    """Fixed quadrature of K_c(u_i, v) f(v) dv for every node u_i of a grid.

    The integration range is split at the grid nodes, with a graded set of
    extra edges between the origin and the first node.  The
    two panels touching u_i use a tanh-sinh rule with the gap to u_i computed
    exactly; all other panels use Gauss-Legendre and share their abscissae
    across targets, so a whole sweep over targets is a dense mat-vec plus a
    small per-target correction.

    Attributes
    ----------
    shared_v : ndarray, shape (M,)
        Abscissae common to all targets.
    dense : dict Channel -> ndarray, shape (N, M)
        Kernel-times-weight matrix on the shared abscissae.
    local_v : ndarray, shape (N, L)
        Per-target abscissae of the two singular panels.
    local : dict Channel -> ndarray, shape (N, L)
    """

    def __init__(self, grid, n_gauss=10, ts_step=0.125):
        nodes = grid.nodes
        n = nodes.size
        self.grid = grid
        edges = grid_panel_edges(nodes)
        first = edges.size - n  # panel index ending at nodes[0]
        self.shared_v, shared_w = grid_panel_rule(grid, n_gauss)
        panel_of = np.repeat(np.arange(edges.size - 1), n_gauss)

        u = nodes[:, None]
        left = first - 1 + np.arange(n)
        own = (panel_of[None, :] == left[:, None]) | (panel_of[None, :] == left[:, None] + 1)
        self.dense = {}
        for ch in Channel:
            mat = reduced_kernel(ch, u, self.shared_v[None, :]) * shared_w[None, :]
            # the two panels touching u_i are integrated by the local rule
            mat[own] = 0.0
            self.dense[ch] = mat

        rule = tanh_sinh_rule(ts_step)
        m = rule[0].size
        local_v = np.empty((n, 2 * m))
        local_w = {ch: np.zeros((n, 2 * m)) for ch in Channel}
        for i in range(n):
            ui = nodes[i]
            vl, wl, _, dbl = _map_panel(edges[first - 1 + i], ui, rule, False)
            local_v[i, :m] = vl
            if i + 1 < n:
                vr, wr, dar, _ = _map_panel(ui, nodes[i + 1], rule, False)
                local_v[i, m:] = vr
            else:
                local_v[i, m:] = ui
            for ch in Channel:
                ok = (wl > 0) & (dbl > 0) & (vl > 0)
                local_w[ch][i, :m][ok] = wl[ok] * reduced_kernel(
                    ch, ui, vl[ok], gap=dbl[ok])
                if i + 1 < n:
                    ok = (wr > 0) & (dar > 0)
                    local_w[ch][i, m:][ok] = wr[ok] * reduced_kernel(
                        ch, ui, vr[ok], gap=dar[ok])
        # v = 0 can appear by rounding at the origin; log(v) must stay finite
        self.local_v = np.maximum(local_v, np.finfo(float).tiny)
        self.local = local_w

    @property
    def n_points(self):
        return self.shared_v.size + self.local_v.size

    def integrate(self, channel, f_shared, f_local):
        """Integrals for all targets given the integrand on both node sets."""
        ch = Channel(channel)
        return self.dense[ch] @ f_shared + np.einsum("ij,ij->i", self.local[ch], f_local)

    def integrate_function(self, channel, func):
        """Same as :meth:`integrate` with ``func`` a vectorised callable."""
        return self.integrate(channel, func(self.shared_v), func(self.local_v))
