"""Smoothness analysis from frame-layer decay.

Global membership in the smoothness class with parameters (p, rho, gamma) is
equivalent to the layer norms ||tau_k f||_p forming a sequence with finite
(rho, gamma) norm; localizing the norms to a window turns the same decay test
into a pointwise smoothness estimator.  gamma_hat for a window is minus the
fitted slope of log2 ||tau_k|| against k.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .integrate import ensure_grid, lebesgue_rule, make_grid, norm_p
from .operators import decompose

# layer norms at or below this are indistinguishable from discretization noise
NUMERICAL_FLOOR = 1e-12


def seq_norm(a, rho, gamma):
    """(sum_n (2^{gamma n} |a_n|)^rho)^{1/rho}, sup over n when rho = inf."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    a = np.asarray(a, dtype=float)
    weighted = 2.0 ** (gamma * np.arange(a.size)) * np.abs(a)
    if np.isinf(rho):
        return float(weighted.max()) if weighted.size else 0.0
    if rho <= 0:
        raise ValueError("rho must be positive")
    return float(np.sum(weighted ** rho) ** (1.0 / rho))


def forward_difference(f, t, k, x):
    """k-th forward difference with step t: sum_l (-1)^{k-l} C(k,l) f(x + l t)."""
    k = int(k)
    if k < 0:
        raise ValueError("difference order must be >= 0")
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for l in range(k + 1):
        acc += (-1.0) ** (k - l) * math.comb(k, l) * np.asarray(f(x + l * t), dtype=float)
    return acc


def q_weight(x, delta):
    """Capped growth weight min(1/delta, sqrt(1 + x^2))."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return np.minimum(1.0 / delta, np.sqrt(1.0 + np.asarray(x, float) ** 2))


# the sup over |t| <= delta is taken over this many equispaced steps
T_GRID_POINTS = 16


def modulus(f, p, r, delta, halfwidth=14.0):
    """Order-r modulus of smoothness at scale delta:

        sum_{k=0}^{r} delta^{r-k} sup_{|t| <= delta} || Q^{r-k} Delta_t^k f ||_p

    with Q the capped weight.  Norms are taken over a panel rule on
    [-halfwidth, halfwidth]; the cap makes the weighted terms integrable there
    for every decaying target.
    """
    r = int(r)
    if r < 1:
        raise ValueError("modulus order must be >= 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    x, w = lebesgue_rule(1.0, halfwidth=halfwidth,
                         max_frequency=getattr(f, "max_frequency", None))
    weights = None if np.isinf(p) else w
    q = q_weight(x, delta)
    total = 0.0
    for k in range(r + 1):
        qfac = q ** (r - k)
        if k == 0:
            best = norm_p(qfac * np.asarray(f(x), dtype=float), p, weights)
        else:
            best = 0.0
            for t in np.linspace(-delta, delta, T_GRID_POINTS):
                best = max(best, norm_p(qfac * forward_difference(f, t, k, x), p, weights))
        total += delta ** (r - k) * best
    return float(total)


@dataclass(frozen=True)
class BesovParams:
    """Smoothness-class parameters: integrability p, fine index rho, order gamma."""

    p: float = float("inf")
    rho: float = float("inf")
    gamma: float = 0.5

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.p <= 0 or self.rho <= 0:
            raise ValueError("p and rho must be positive")


@dataclass(frozen=True)
class GlobalClassification:
    """Report (not a proof) of membership at the given parameters."""

    params: BesovParams
    level_norms: tuple
    weighted_norms: tuple     # 2^{gamma k} ||tau_k||
    value: float              # seq_norm of the level norms
    gamma_hat: float          # minus fitted slope of log2 ||tau_k||
    consistent: bool          # gamma_hat >= gamma within fit noise


def global_classify(f, aleph, params, levels, grid=None, filt=None):
    """Layer norms over a wide window, their sequence norm, and the decay fit."""
    if grid is None:
        grid = default_analysis_grid(levels)
    grid = ensure_grid(grid)
    _, wts = _grid_weights(grid)
    dec = decompose(aleph, f, grid, levels, filt)
    norms = tuple(norm_p(layer, params.p, None if np.isinf(params.p) else wts)
                  for layer in dec.layers)
    weighted = tuple(2.0 ** (params.gamma * k) * v for k, v in enumerate(norms))
    gamma_hat, _ = fit_decay(norms)
    consistent = bool(gamma_hat is not None and gamma_hat >= params.gamma - 0.05)
    return GlobalClassification(params=params, level_norms=norms,
                                weighted_norms=weighted,
                                value=seq_norm(norms, params.rho, params.gamma),
                                gamma_hat=float("nan") if gamma_hat is None else gamma_hat,
                                consistent=consistent)


def _grid_weights(grid):
    """Trapezoid weights for p-norms on an explicit evaluation grid."""
    g = np.asarray(grid, dtype=float)
    if g.size == 1:
        return g, np.ones(1)
    w = np.empty_like(g)
    w[0] = (g[1] - g[0]) / 2.0
    w[-1] = (g[-1] - g[-2]) / 2.0
    w[1:-1] = (g[2:] - g[:-2]) / 2.0
    return g, w


def default_analysis_grid(levels, halfwidth=14.0):
    """Grid fine enough to resolve the top layer's oscillation."""
    wavelength = math.pi / (2.0 ** levels * math.sqrt(2.0))
    step = wavelength / 6.0
    return make_grid(-halfwidth, halfwidth, step)


def fit_decay(level_norms, floor=NUMERICAL_FLOOR, min_level=0):
    """Least-squares slope of log2 norm vs level over the resolved levels.

    Levels below min_level are preasymptotic (their layers live at scales
    coarser than the window being measured) and are excluded, as are levels
    at or below the numerical floor.  Returns (gamma_hat, rms_residual), or
    (None, None) when fewer than three levels survive: at this depth the
    target's local decay outruns what the layers can resolve.
    """
    norms = np.asarray(level_norms, dtype=float)
    levels = np.arange(norms.size)
    usable = (norms > floor) & (levels >= int(min_level))
    if int(usable.sum()) < 3:
        return None, None
    x = levels[usable].astype(float)
    y = np.log2(norms[usable])
    coef = np.polyfit(x, y, 1)
    fitted = np.polyval(coef, x)
    rms = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return float(-coef[0]), rms


@dataclass(frozen=True)
class Window:
    """Closed interval [center - radius, center + radius]."""

    center: float
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("window radius must be positive")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.center - self.radius) & (x <= self.center + self.radius)


def windows_on(lo, hi, radius=0.25, stride=None):
    """Windows with centers marching across [lo, hi]."""
    if stride is None:
        stride = radius / 2.0
    centers = np.arange(lo, hi + stride / 2.0, stride)
    return [Window(float(c), float(radius)) for c in centers]


@dataclass(frozen=True)
class WindowResult:
    center: float
    radius: float
    gamma_hat: float          # nan when resolved_smooth
    fit_residual: float
    levels_used: int
    level_norms: tuple
    resolved_smooth: bool


@dataclass(frozen=True)
class SmoothnessReport:
    """Per-window local smoothness estimates for one target function."""

    p: float
    levels: int
    results: tuple

    def min_gamma_windows(self, count=1):
        """Windows sorted by ascending gamma_hat (singularities first)."""
        scored = [r for r in self.results if not r.resolved_smooth]
        scored.sort(key=lambda r: r.gamma_hat)
        return scored[:count]

    def at(self, center, tol=1e-9):
        for r in self.results:
            if abs(r.center - center) <= tol:
                return r
        raise KeyError(f"no window centered at {center:g}")

    def to_json(self, path):
        payload = {
            "p": None if np.isinf(self.p) else self.p,
            "depth": self.levels,
            "windows": [
                {
                    "center": r.center,
                    "radius": r.radius,
                    "gamma_hat": None if r.resolved_smooth else r.gamma_hat,
                    "residual": None if r.resolved_smooth else r.fit_residual,
                    "levels": r.levels_used,
                    "level_norms": [f"{v:.17g}" for v in r.level_norms],
                    "resolved_smooth": r.resolved_smooth,
                }
                for r in self.results
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["center", "radius", "gamma_hat", "residual",
                             "levels", "resolved_smooth"])
            for r in self.results:
                writer.writerow([
                    f"{r.center:.17g}", f"{r.radius:.17g}",
                    "" if r.resolved_smooth else f"{r.gamma_hat:.17g}",
                    "" if r.resolved_smooth else f"{r.fit_residual:.17g}",
                    r.levels_used, int(r.resolved_smooth),
                ])


def local_smoothness_map(f, aleph, p, windows, levels, grid=None, filt=None):
    """Estimate local smoothness on each window from windowed layer-norm decay.

    The decomposition is computed once on a shared grid; each window then reads
    off its own restricted norms.  The slope is fitted only over levels whose
    layer scale 2^-k is at most half the window radius: coarser layers see the
    target's global shape, not the behavior inside the window, and individual
    early layers can vanish by accident of the coefficient sequence.  Windows
    where fewer than three resolved layers rise above the numerical floor are
    reported as resolved-smooth: the target is indistinguishable from a low
    order weighted polynomial there at this depth.
    """
    if not windows:
        raise ValueError("need at least one window")
    levels = int(levels)
    if grid is None:
        lo = min(w.center - w.radius for w in windows)
        hi = max(w.center + w.radius for w in windows)
        wavelength = math.pi / (2.0 ** levels * math.sqrt(2.0))
        grid = make_grid(lo - 0.5, hi + 0.5, wavelength / 6.0)
    grid = ensure_grid(grid)
    _, wts = _grid_weights(grid)
    dec = decompose(aleph, f, grid, levels, filt)
    results = []
    for win in windows:
        inside = win.contains(grid)
        if not np.any(inside):
            raise ValueError(f"window at {win.center:g} contains no grid points")
        norms = tuple(norm_p(layer[inside], p, None if np.isinf(p) else wts[inside])
                      for layer in dec.layers)
        min_fit = max(0, math.ceil(math.log2(2.0 / win.radius)))
        usable = int(np.sum((np.asarray(norms) > NUMERICAL_FLOOR)
                            & (np.arange(len(norms)) >= min_fit)))
        gamma_hat, rms = fit_decay(norms, min_level=min_fit)
        if gamma_hat is None:
            results.append(WindowResult(win.center, win.radius, float("nan"),
                                        float("nan"), usable, norms, True))
        else:
            results.append(WindowResult(win.center, win.radius, gamma_hat, rms,
                                        usable, norms, False))
    return SmoothnessReport(p=float(p), levels=levels, results=tuple(results))
