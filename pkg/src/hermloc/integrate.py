"""Composite Gauss-Legendre panel rules and grid norms.

This is plumbing shared by the oracle checks (orthonormality, coefficient
integrals) and by the Lebesgue side of the operators.  The panel layout is
fixed by two resolution rules: the maximal node gap must not exceed 1/(10 n)
for work at order n, and a target with known top frequency gets panels short
enough that each holds only a few oscillation periods.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

NODES_PER_PANEL = 32


@lru_cache(maxsize=8)
def _gl_nodes(count):
    x, w = np.polynomial.legendre.leggauss(count)
    return x, w


def gauss_legendre_panels(lo, hi, panel_width, nodes_per_panel=NODES_PER_PANEL):
    """Composite Gauss-Legendre rule on [lo, hi] with panels of width <= panel_width.

    Returns (x, w) with strictly increasing x.
    """
    if not hi > lo:
        raise ValueError("empty integration interval")
    if panel_width <= 0:
        raise ValueError("panel width must be positive")
    n_panels = max(1, int(math.ceil((hi - lo) / panel_width)))
    edges = np.linspace(lo, hi, n_panels + 1)
    base_x, base_w = _gl_nodes(nodes_per_panel)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    w = (half[:, None] * base_w[None, :]).ravel()
    return x, w


@lru_cache(maxsize=1)
def oracle_rule():
    """The reference integrator: panels of width 0.25 on [-40, 40], 32 nodes each.

    Resolves every psi_j needed by the checks (the 32-node rule is exact to
    machine precision for a few oscillation periods per panel) and the window
    covers the essential support of all of them.
    """
    return gauss_legendre_panels(-40.0, 40.0, 0.25)


def lebesgue_rule(n, max_frequency=None, halfwidth=None, support_halfwidth=None):
    """Panel rule for Lebesgue integrals of f * psi_j, j < n^2, f bounded.

    Window: H = max(2n+1, 14) covers both the span of {psi_j : sqrt(j) < n}
    and the tails of generic decaying targets, but is capped at sqrt(2) n + 8,
    past which every psi_j below the cutoff is under 1e-15 so the integrand is
    negligible for any bounded f.  A target that declares its own decay width
    (|f| below 1e-15 of peak outside it) caps the window further.  Panel
    width: small enough that the maximal node gap is <= 1/(10 n), and, when
    the target declares a top angular frequency, at most a few periods of it
    per panel.
    """
    n = float(n)
    if n <= 0:
        raise ValueError("order must be positive")
    if halfwidth is None:
        halfwidth = min(max(2.0 * n + 1.0, 14.0), math.sqrt(2.0) * n + 8.0)
        if support_halfwidth:
            halfwidth = min(halfwidth, float(support_halfwidth))
    width = min(0.25, 2.0 / n)
    if max_frequency:
        width = min(width, 40.0 / float(max_frequency))
    return gauss_legendre_panels(-halfwidth, halfwidth, width)


def norm_p(values, p, weights=None):
    """Grid p-norm: max |v| for p = inf, else (sum w |v|^p)^(1/p).

    For finite p the weights are required (they carry the measure of the grid).
    """
    v = np.asarray(values, dtype=float)
    if np.isinf(p):
        return float(np.max(np.abs(v))) if v.size else 0.0
    if p <= 0:
        raise ValueError("p must be positive")
    if weights is None:
        raise ValueError("finite-p norms need quadrature weights")
    w = np.asarray(weights, dtype=float)
    return float(np.sum(w * np.abs(v) ** p) ** (1.0 / p))


def make_grid(lo, hi, step):
    """Uniform strictly-increasing evaluation grid including both endpoints."""
    if step <= 0 or not hi > lo:
        raise ValueError("grid requires hi > lo and step > 0")
    count = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, count)


def ensure_grid(x):
    """Validate a strictly increasing finite 1-d grid and return it as ndarray."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("grid must be a non-empty 1-d array")
    if not np.all(np.isfinite(x)):
        raise ValueError("grid must be finite")
    if x.size > 1 and not np.all(np.diff(x) > 0):
        raise ValueError("grid must be strictly increasing")
    return x
