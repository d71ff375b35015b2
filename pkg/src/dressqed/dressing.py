"""Sampled dressing functions (g0, g1) on a logarithmic momentum grid.

g0 is stored directly as ``h0``; g1 is stored as the slope ``h1 = g1/u`` so
that the free solution (m0, u) is exactly representable and the small-u
behaviour g1 ~ u/Z is resolved with relative accuracy.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "ModelParams",
    "MomentumGrid",
    "DressingFunctions",
    "BoundsBox",
    "GridMismatchError",
    "eval_dressing",
    "sup_distance",
    "membership_check",
    "write_csv",
    "read_csv",
]


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``alpha``, cutoff momentum ``cutoff`` and bare mass ``m0``."""

    alpha: float
    cutoff: float
    m0: float = 1.0

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if not self.m0 >= 0:
            raise ValueError(f"m0 must be nonnegative, got {self.m0}")

    @classmethod
    def from_ratio(cls, alpha, lambda_over_m0, m0=1.0):
        return cls(alpha=alpha, cutoff=lambda_over_m0 * m0, m0=m0)

    @property
    def lambda_over_m0(self):
        return self.cutoff / self.m0 if self.m0 > 0 else math.inf

    @property
    def massless(self):
        return self.m0 == 0


@dataclass(frozen=True)
class MomentumGrid:
    nodes: np.ndarray
    u_min_ratio: float

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size == 0:
            raise ValueError("grid needs at least one node")
        if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be positive and strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def log_uniform(cls, cutoff, n=512, u_min_ratio=1e-8):
        """``n`` log-spaced nodes from ``cutoff * u_min_ratio`` to ``cutoff``."""
        if n < 2:
            raise ValueError("log-uniform grid needs n >= 2")
        if not 0 < u_min_ratio < 1:
            raise ValueError("u_min_ratio must lie in (0, 1)")
        nodes = cutoff * np.exp(np.linspace(math.log(u_min_ratio), 0.0, n))
        nodes[-1] = cutoff
        return cls(nodes, u_min_ratio)

    @property
    def cutoff(self):
        return float(self.nodes[-1])

    @property
    def log_nodes(self):
        return np.log(self.nodes)

    def __len__(self):
        return self.nodes.size

    def same_as(self, other):
        return self is other or (
            len(self) == len(other) and np.array_equal(self.nodes, other.nodes)
        )


@dataclass(frozen=True)
class DressingFunctions:
    """Immutable samples h0[i] = g0(u_i), h1[i] = g1(u_i)/u_i."""

    grid: MomentumGrid
    h0: np.ndarray
    h1: np.ndarray

    def __post_init__(self):
        h0 = np.array(self.h0, dtype=float)
        h1 = np.array(self.h1, dtype=float)
        if h0.shape != (len(self.grid),) or h1.shape != (len(self.grid),):
            raise ValueError("h0 and h1 must have one entry per grid node")
        if not (np.all(np.isfinite(h0)) and np.all(np.isfinite(h1))):
            raise ValueError("dressing samples must be finite")
        h0.setflags(write=False)
        h1.setflags(write=False)
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "h1", h1)

    @classmethod
    def free(cls, grid, m0=1.0):
        """The free solution g0 = m0, g1 = u."""
        n = len(grid)
        return cls(grid, np.full(n, float(m0)), np.ones(n))

    @property
    def u(self):
        return self.grid.nodes

    @property
    def g0(self):
        return self.h0

    @property
    def g1(self):
        return self.grid.nodes * self.h1

    def interpolate(self, v):
        """Vectorised (h0(v), h1(v)) for v in (0, cutoff]; no domain checks.

        Piecewise linear in log v, constant below the first node.
        """
        logv = np.log(v)
        xs = self.grid.log_nodes
        return np.interp(logv, xs, self.h0), np.interp(logv, xs, self.h1)


@dataclass(frozen=True)
class BoundsBox:
    """Half-widths of the invariant box S_{eps,delta}."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if self.epsilon < 0 or self.delta < 0:
            raise ValueError("epsilon and delta must be nonnegative")


def eval_dressing(f, u):
    """Evaluate (g0(u), g1(u)) of a sampled dressing pair.

    Parameters
    ----------
    f : DressingFunctions
    u : float or array_like
        Momenta in (0, cutoff].

    Returns
    -------
    (g0, g1) : tuple of float or ndarray
    """
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0) or np.any(arr > f.grid.cutoff):
        raise ValueError(f"u must lie in (0, {f.grid.cutoff}]")
    h0, h1 = f.interpolate(arr)
    g0, g1 = h0, arr * h1
    if arr.ndim == 0:
        return float(g0), float(g1)
    return g0, g1


def sup_distance(f, g):
    """max_i (|f.g0 - g.g0| + |f.g1 - g.g1|) over the shared grid nodes."""
    if not f.grid.same_as(g.grid):
        raise GridMismatchError("sup_distance needs both functions on the same grid")
    u = f.grid.nodes
    return float(np.max(np.abs(f.h0 - g.h0) + u * np.abs(f.h1 - g.h1)))


def membership_check(f, params, box, rtol=0.0):
    """True iff m0 <= g0 <= (1+delta) m0 and u <= g1 <= (1+eps) u at every node.

    ``rtol`` loosens each bound by a relative amount; zero means exact.
    """
    m0 = params.m0
    lo0, hi0 = m0 * (1 - rtol), (1 + box.delta) * m0 * (1 + rtol)
    lo1, hi1 = 1 - rtol, (1 + box.epsilon) * (1 + rtol)
    return bool(
        np.all(f.h0 >= lo0) and np.all(f.h0 <= hi0)
        and np.all(f.h1 >= lo1) and np.all(f.h1 <= hi1)
    )


def write_csv(f, path, extra_columns=None):
    """Write ``u,g0,g1,g1_over_u[,extra...]`` with 17 significant digits."""
    extra_columns = extra_columns or {}
    path = Path(path)
    header = ["u", "g0", "g1", "g1_over_u", *extra_columns]
    cols = [f.u, f.g0, f.g1, f.h1, *extra_columns.values()]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([f"{x:.17g}" for x in row])
    return path


def read_csv(path, u_min_ratio=None):
    """Inverse of :func:`write_csv`; ``h1`` is taken from the g1_over_u column."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    u = np.array([float(r["u"]) for r in rows])
    h0 = np.array([float(r["g0"]) for r in rows])
    h1 = np.array([float(r["g1_over_u"]) for r in rows])
    ratio = u_min_ratio if u_min_ratio is not None else u[0] / u[-1]
    return DressingFunctions(MomentumGrid(u, ratio), h0, h1)
