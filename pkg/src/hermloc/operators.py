"""Summability operators and frame decompositions.

sigma_n(nu; f) filters the Hermite coefficients of f taken against the measure
nu and synthesizes back; it reproduces everything in the span of
{psi_j : sqrt(j) < n/2} whenever nu integrates products of order-n weighted
polynomials exactly.  The frame layers are the dyadic differences

    tau_0 = sigma_1(nu_0; f),   tau_k = sigma_{2^k}(nu_k; f) - sigma_{2^{k-1}}(nu_{k-1}; f),

which telescope back to sigma_{2^N}(nu_N; f) and whose decay encodes local
smoothness.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .filters import LowPassFilter, filter_eval
from .hermite import (hermite_synthesis, hermite_synthesis_dx,
                      hermite_transform, psi_batch, space_dimension)
from .integrate import ensure_grid, lebesgue_rule, norm_p
from .quadrature import DiscreteMeasure, range_truncation


class _Lebesgue:
    """Marker singleton for the Lebesgue measure on the line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Lebesgue"


LEBESGUE = _Lebesgue()


# ---------------------------------------------------------------------------
# target functions

def _gaussian(x):
    return np.exp(-np.asarray(x, float) ** 2)


def _sqrtabs_bump(x):
    x = np.asarray(x, float)
    return np.sqrt(np.abs(x)) * np.exp(-x * x)


def _f1_tapered(x):
    x = np.asarray(x, float)
    return np.sqrt(np.abs(np.cos(x))) * np.exp(-x * x / 8.0)


def _f2_tapered(x):
    x = np.asarray(x, float)
    acc = np.zeros_like(x)
    for k in range(9):
        acc += 2.0 ** (-k) * np.cos(4.0 ** k * x)
    return acc * np.exp(-x * x / 8.0)


# top angular frequency present; the Lebesgue integrator shortens its panels
# accordingly so the high components are resolved instead of aliased
_f2_tapered.max_frequency = 4.0 ** 8

# half-widths past which |f| is below 1e-15 of its peak, so the Lebesgue
# integrator can stop there: exp(-x^2) needs |x| >= 5.9, exp(-x^2/8) needs
# |x| >= 16.7
_gaussian.support_halfwidth = 6.5
_sqrtabs_bump.support_halfwidth = 6.5
_f1_tapered.support_halfwidth = 17.0
_f2_tapered.support_halfwidth = 17.0

BUILTIN_NAMES = ("gaussian", "sqrtabs_bump", "f1_tapered", "f2_tapered", "hermite:J")


def builtin(name):
    """Named target functions for the command line and the test batteries."""
    table = {
        "gaussian": _gaussian,
        "sqrtabs_bump": _sqrtabs_bump,
        "f1_tapered": _f1_tapered,
        "f2_tapered": _f2_tapered,
    }
    if name in table:
        return table[name]
    if name.startswith("hermite:"):
        j = int(name.split(":", 1)[1])
        if j < 0:
            raise ValueError("hermite index must be non-negative")

        def psi_j(x, _j=j):
            return psi_batch(_j + 1, x)[-1]
        psi_j.__name__ = f"psi_{j}"
        psi_j.support_halfwidth = math.sqrt(2.0 * j) + 8.0
        return psi_j
    raise ValueError(f"unknown function {name!r}; known: {', '.join(BUILTIN_NAMES)}")


@dataclass(frozen=True)
class SampledFunction:
    """A function known only at fixed abscissae.

    Callable, but only at exactly the stored points; anything else is a domain
    error rather than silent interpolation.
    """

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        order = np.argsort(x)
        x, v = x[order], v[order]
        if x.size == 0 or np.any(np.diff(x) <= 0):
            raise ValueError("sample abscissae must be distinct")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    def __call__(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        idx = np.searchsorted(self.x, q)
        ok = (idx < self.x.size) & np.isclose(self.x[np.minimum(idx, self.x.size - 1)], q,
                                              rtol=0.0, atol=0.0)
        if not np.all(ok):
            missing = q[~ok][:3]
            raise ValueError(f"sampled function has no values at {missing}")
        return self.values[idx]


# ---------------------------------------------------------------------------
# coefficients and projections

def fourier_hermite(f, nu, J):
    """Coefficients f_hat(nu; j) = integral of f psi_j d nu for j < J."""
    J = int(J)
    if J < 1:
        raise ValueError("need at least one coefficient")
    if nu is LEBESGUE:
        n_eff = max(1.0, math.sqrt(J))
        x, w = lebesgue_rule(n_eff, max_frequency=getattr(f, "max_frequency", None),
                             support_halfwidth=getattr(f, "support_halfwidth", None))
        return hermite_transform(x, w * np.asarray(f(x), dtype=float), J)
    if isinstance(nu, DiscreteMeasure):
        y = nu.support
        return hermite_transform(y, nu.weights * np.asarray(f(y), dtype=float), J)
    raise TypeError(f"unsupported measure {nu!r}")


@dataclass(frozen=True)
class Projection:
    """sigma_n(nu; f) sampled on a grid, with its filtered coefficients."""

    n: float
    coeffs: np.ndarray        # h(sqrt(j)/n) * f_hat(nu; j), j < ceil(n^2)
    grid: np.ndarray
    values: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "value"])
            for x, v in zip(self.grid, self.values):
                writer.writerow([f"{x:.17g}", f"{v:.17g}"])

    def to_json(self, path):
        payload = {"order": self.n, "coefficients": [f"{c:.17g}" for c in self.coeffs]}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def sigma(n, nu, f, grid, filt=None):
    """The order-n filtered projection of f against nu, evaluated on grid."""
    if n <= 0:
        raise ValueError("order must be positive")
    filt = filt or LowPassFilter()
    grid = ensure_grid(np.atleast_1d(grid))
    J = space_dimension(n)
    raw = fourier_hermite(f, nu, J)
    h = filter_eval(filt, np.sqrt(np.arange(J)) / n)
    coeffs = h * raw
    return Projection(n=float(n), coeffs=coeffs, grid=grid,
                      values=hermite_synthesis(coeffs, grid))


def sigma_dx(n, nu, f, grid, filt=None):
    """Space derivative of sigma_n(nu; f) on the grid (term-by-term psi')."""
    if n <= 0:
        raise ValueError("order must be positive")
    filt = filt or LowPassFilter()
    grid = ensure_grid(np.atleast_1d(grid))
    J = space_dimension(n)
    raw = fourier_hermite(f, nu, J)
    h = filter_eval(filt, np.sqrt(np.arange(J)) / n)
    return hermite_synthesis_dx(h * raw, grid)


def sigma_kernel_route(n, nu, f, grid, filt=None):
    """sigma_n evaluated as an integral of f against the localized kernel.

    Mathematically identical to the coefficient route in sigma(); kept as an
    independent code path for consistency checks.
    """
    from .filters import LocalizedKernel, kernel_matrix
    filt = filt or LowPassFilter()
    grid = ensure_grid(np.atleast_1d(grid))
    kern = LocalizedKernel(float(n), filt)
    if nu is LEBESGUE:
        x, w = lebesgue_rule(max(1.0, float(n)),
                             max_frequency=getattr(f, "max_frequency", None),
                             support_halfwidth=getattr(f, "support_halfwidth", None))
        return kernel_matrix(kern, grid, x) @ (w * np.asarray(f(x), dtype=float))
    y = nu.support
    return kernel_matrix(kern, grid, y) @ (nu.weights * np.asarray(f(y), dtype=float))


# ---------------------------------------------------------------------------
# measure sequences and frame layers

@dataclass(frozen=True)
class MeasureSequence:
    """Measures nu_0, nu_1, ... tagged with the product order each certifies.

    Level k is used inside sigma_{2^k}, which needs products of order-2^k
    weighted polynomials integrated exactly, so orders[k] >= 2^{k+1} keeps a
    reproduction margin of a factor two.
    """

    measures: tuple
    orders: tuple

    def __post_init__(self):
        if len(self.measures) != len(self.orders):
            raise ValueError("one order tag per measure")
        for k, order in enumerate(self.orders):
            if order < 2 ** (k + 1):
                raise ValueError(f"level {k} needs order >= {2 ** (k + 1)}, got {order:g}")

    def __len__(self):
        return len(self.measures)

    def measure(self, level):
        return self.measures[level]

    @classmethod
    def lebesgue(cls, levels):
        """All-Lebesgue sequence for levels 0..levels (inclusive)."""
        count = int(levels) + 1
        return cls(measures=(LEBESGUE,) * count,
                   orders=tuple(float(2 ** (k + 1)) for k in range(count)))

    @classmethod
    def from_rules(cls, rules):
        """Wrap solved quadrature rules; their certified orders must cover the
        dyadic schedule and their residuals must be on record (unflagged)."""
        for k, rule in enumerate(rules):
            if rule.flagged:
                raise ValueError(f"level {k} rule is flagged (residual {rule.residual:g})")
        return cls(measures=tuple(r.measure for r in rules),
                   orders=tuple(float(r.order) for r in rules))


def tau(aleph, level, f, grid, filt=None):
    """Frame layer: tau_0 = sigma_1, tau_k = sigma_{2^k} - sigma_{2^{k-1}}."""
    level = int(level)
    if level < 0:
        raise ValueError("level must be >= 0")
    if level == 0:
        return sigma(1.0, aleph.measure(0), f, grid, filt).values
    hi = sigma(float(2 ** level), aleph.measure(level), f, grid, filt).values
    lo = sigma(float(2 ** (level - 1)), aleph.measure(level - 1), f, grid, filt).values
    return hi - lo


@dataclass(frozen=True)
class FrameDecomposition:
    """All layers tau_0..tau_N of one target on one grid."""

    grid: np.ndarray
    projections: tuple    # Projection at orders 2^0 .. 2^N
    layers: tuple         # tau_k values, same length

    @property
    def levels(self):
        return len(self.layers) - 1

    def layer(self, k):
        return self.layers[k]

    def partial_sum(self, upto=None):
        upto = self.levels if upto is None else int(upto)
        return np.sum(self.layers[:upto + 1], axis=0)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x"] + [f"tau_{k}" for k in range(self.levels + 1)])
            for i, x in enumerate(self.grid):
                writer.writerow([f"{x:.17g}"] +
                                [f"{layer[i]:.17g}" for layer in self.layers])

    def to_json(self, path):
        payload = {
            "levels": self.levels,
            "coefficients": [[f"{c:.17g}" for c in proj.coeffs]
                             for proj in self.projections],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def decompose(aleph, f, grid, levels, filt=None):
    """Compute each sigma_{2^k} once and difference adjacent ones."""
    levels = int(levels)
    if levels < 0:
        raise ValueError("levels must be >= 0")
    if levels + 1 > len(aleph):
        raise ValueError(f"measure sequence has {len(aleph)} levels, need {levels + 1}")
    grid = ensure_grid(np.atleast_1d(grid))
    projections = [sigma(float(2 ** k), aleph.measure(k), f, grid, filt)
                   for k in range(levels + 1)]
    layers = [projections[0].values]
    for k in range(1, levels + 1):
        layers.append(projections[k].values - projections[k - 1].values)
    return FrameDecomposition(grid=grid, projections=tuple(projections),
                              layers=tuple(layers))


def reconstruct(decomposition, upto=None):
    """Sum the layers back; equals the top projection by telescoping."""
    return decomposition.partial_sum(upto)


# ---------------------------------------------------------------------------
# error estimates

@dataclass(frozen=True)
class ApproxErrorEstimate:
    """r_n = ||sigma_n f - f||_p on the truncation window.

    The same number plays two roles: it bounds the best order-n approximation
    error from above, and (up to a fixed unknown constant) the best order-n/2
    error from below.
    """

    value: float
    n: float
    p: float

    @property
    def upper_scale(self):
        return self.value

    @property
    def lower(self):
        return self.value


def approx_error_estimate(f, n, p, nu=LEBESGUE, filt=None):
    """Compute r_n on the panel rule over the order-n truncation window."""
    lo, hi = range_truncation(n, p)
    x, w = lebesgue_rule(max(1.0, float(n)),
                         max_frequency=getattr(f, "max_frequency", None),
                         halfwidth=max(hi, 14.0))
    proj = sigma(n, nu, f, x, filt)
    diff = proj.values - np.asarray(f(x), dtype=float)
    inside = (x >= lo) & (x <= hi)
    r_n = norm_p(diff[inside], p, None if np.isinf(p) else w[inside])
    return ApproxErrorEstimate(value=r_n, n=float(n), p=float(p))
