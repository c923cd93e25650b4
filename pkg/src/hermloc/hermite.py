"""Orthonormal Hermite functions: recurrence evaluation, transforms, closed-form kernels.

The basis is the weighted one, psi_j(x) = H_j(x) exp(-x^2/2) up to normalization,
orthonormal in L2(dx).  Everything downstream (kernels, quadrature moments,
frame operators) evaluates through the three-term recurrence implemented here;
no unweighted Hermite polynomial is ever formed, so there is no overflow for
large index or large argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)
_PSI0_COEF = math.pi ** -0.25


def _as_finite_array(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("evaluation points must be finite")
    return x


def psi_batch(J, x):
    """Evaluate psi_0 .. psi_{J-1} at x.

    Parameters
    ----------
    J : int
        Number of basis functions (highest index J-1).
    x : float or 1-d array
        Evaluation points, must be finite.

    Returns
    -------
    ndarray
        Shape (J,) for scalar x, (J, len(x)) for array x.

    Notes
    -----
    Uses the weight-folded recurrence

        psi_{j+1}(x) = x sqrt(2/(j+1)) psi_j(x) - sqrt(j/(j+1)) psi_{j-1}(x)

    starting from psi_0 = pi^(-1/4) exp(-x^2/2).  The psi_j stay uniformly
    bounded, so the forward recurrence is stable for every index and argument.
    """
    J = int(J)
    if J < 1:
        raise ValueError("J must be a positive integer")
    x = _as_finite_array(x)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    out = np.empty((J, xv.size))
    out[0] = _PSI0_COEF * np.exp(-0.5 * xv * xv)
    if J > 1:
        out[1] = math.sqrt(2.0) * xv * out[0]
    for j in range(1, J - 1):
        out[j + 1] = (math.sqrt(2.0 / (j + 1)) * xv) * out[j] \
            - math.sqrt(j / (j + 1.0)) * out[j - 1]
    return out[:, 0] if scalar else out


def psi_derivative_batch(J, x):
    """Evaluate psi_0' .. psi_{J-1}' at x via psi_j' = sqrt(2j) psi_{j-1} - x psi_j.

    Same shape conventions as :func:`psi_batch`.
    """
    J = int(J)
    if J < 1:
        raise ValueError("J must be a positive integer")
    x = _as_finite_array(x)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    p = psi_batch(J, xv)
    d = np.empty_like(p)
    d[0] = -xv * p[0]
    for j in range(1, J):
        d[j] = math.sqrt(2.0 * j) * p[j - 1] - xv * p[j]
    return d[:, 0] if scalar else d


def hermite_transform(x, weighted_values, J):
    """Accumulate sum_k v_k psi_j(x_k) for j < J without storing the basis matrix.

    `weighted_values` already carries any quadrature weights.  O(J len(x)) time,
    O(len(x)) memory; used for coefficient passes where J len(x) is large.
    """
    x = _as_finite_array(np.atleast_1d(x))
    v = np.asarray(weighted_values, dtype=float)
    if v.shape != x.shape:
        raise ValueError("weighted_values must match x in shape")
    out = np.empty(int(J))
    prev = _PSI0_COEF * np.exp(-0.5 * x * x)
    out[0] = v @ prev
    if J == 1:
        return out
    cur = math.sqrt(2.0) * x * prev
    out[1] = v @ cur
    for j in range(1, int(J) - 1):
        nxt = (math.sqrt(2.0 / (j + 1)) * x) * cur - math.sqrt(j / (j + 1.0)) * prev
        out[j + 1] = v @ nxt
        prev, cur = cur, nxt
    return out


def hermite_synthesis(coeffs, x):
    """Evaluate sum_j c_j psi_j(x) by recurrence accumulation (no basis matrix)."""
    c = np.asarray(coeffs, dtype=float)
    x = _as_finite_array(np.atleast_1d(x))
    acc = np.zeros_like(x)
    prev = _PSI0_COEF * np.exp(-0.5 * x * x)
    acc += c[0] * prev
    if c.size == 1:
        return acc
    cur = math.sqrt(2.0) * x * prev
    acc += c[1] * cur
    for j in range(1, c.size - 1):
        nxt = (math.sqrt(2.0 / (j + 1)) * x) * cur - math.sqrt(j / (j + 1.0)) * prev
        acc += c[j + 1] * nxt
        prev, cur = cur, nxt
    return acc


def hermite_synthesis_dx(coeffs, x):
    """Evaluate sum_j c_j psi_j'(x) using psi_j' = sqrt(2j) psi_{j-1} - x psi_j."""
    c = np.asarray(coeffs, dtype=float)
    x = _as_finite_array(np.atleast_1d(x))
    prev = _PSI0_COEF * np.exp(-0.5 * x * x)
    acc = c[0] * (-x * prev)
    if c.size == 1:
        return acc
    cur = math.sqrt(2.0) * x * prev
    acc += c[1] * (math.sqrt(2.0) * prev - x * cur)
    for j in range(1, c.size - 1):
        nxt = (math.sqrt(2.0 / (j + 1)) * x) * cur - math.sqrt(j / (j + 1.0)) * prev
        acc += c[j + 1] * (math.sqrt(2.0 * (j + 1)) * cur - x * nxt)
        prev, cur = cur, nxt
    return acc


@dataclass(frozen=True)
class HermiteBasis:
    """First `max_index` orthonormal Hermite functions as a unit."""

    max_index: int

    def __post_init__(self):
        if self.max_index < 1:
            raise ValueError("max_index must be >= 1")

    def values(self, x):
        return psi_batch(self.max_index, x)

    def derivatives(self, x):
        return psi_derivative_batch(self.max_index, x)

    @staticmethod
    def weight(x):
        x = _as_finite_array(x)
        return np.exp(-0.5 * x * x)


@dataclass(frozen=True)
class WeightedPolynomial:
    """Finite expansion sum_j a_j psi_j; lies in the span of {psi_j : sqrt(j) < t}
    whenever a_j = 0 for sqrt(j) >= t."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be a finite non-empty vector")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x):
        return weighted_poly_eval(self, x)

    @property
    def l2_norm(self):
        # Parseval: the coefficient norm is the exact L2(dx) norm.
        return float(np.linalg.norm(self.coeffs))

    def in_space(self, t):
        """True when every active coefficient index j satisfies sqrt(j) < t."""
        idx = np.nonzero(self.coeffs)[0]
        return bool(idx.size == 0 or math.sqrt(idx.max()) < t)

    @classmethod
    def random(cls, t, rng):
        """Standard-normal coefficients on all indices j with sqrt(j) < t."""
        count = space_dimension(t)
        return cls(rng.standard_normal(count))


def space_dimension(t):
    """Number of indices j >= 0 with sqrt(j) < t."""
    if t <= 0:
        raise ValueError("t must be positive")
    return int(math.ceil(t * t - 1e-12))


def weighted_poly_eval(poly, x):
    """Evaluate a WeightedPolynomial: literally the dot product of its
    coefficients with the psi_batch stack."""
    c = poly.coeffs if isinstance(poly, WeightedPolynomial) else np.asarray(poly, float)
    return c @ psi_batch(c.size, x)


def mehler(x, y, r):
    """Closed form of sum_j r^j psi_j(x) psi_j(y) for |r| < 1.

    (pi (1-r^2))^(-1/2) exp( -r (x-y)^2 / (1-r^2) - (1-r)/(1+r) (x^2+y^2)/2 ).
    """
    if not abs(r) < 1:
        raise ValueError("mehler kernel requires |r| < 1")
    x = _as_finite_array(x)
    y = _as_finite_array(y)
    pref = 1.0 / math.sqrt(math.pi * (1.0 - r * r))
    quad = -r * (x - y) ** 2 / (1.0 - r * r) \
        - (1.0 - r) / (1.0 + r) * (x * x + y * y) / 2.0
    return pref * np.exp(quad)


def heat_kernel_closed(x, y, t):
    """Closed form of sum_j exp(-jt) psi_j(x) psi_j(y) for t > 0.

    Substituting r = exp(-t) into the Mehler kernel gives
        e^{t/2} (2 pi sinh t)^(-1/2)
            exp( -(x-y)^2 / (2 sinh t) - tanh(t/2) (x^2+y^2) / 2 ),
    since r/(1-r^2) = 1/(2 sinh t) and (1-r)/(1+r) = tanh(t/2).
    """
    if t <= 0:
        raise ValueError("heat kernel requires t > 0")
    x = _as_finite_array(x)
    y = _as_finite_array(y)
    pref = math.exp(0.5 * t) / math.sqrt(2.0 * math.pi * math.sinh(t))
    quad = -((x - y) ** 2) / (2.0 * math.sinh(t)) \
        - 0.5 * math.tanh(0.5 * t) * (x * x + y * y)
    return pref * np.exp(quad)


def heat_kernel_series(x, y, t, J):
    """Truncated series sum_{j<J} exp(-jt) psi_j(x) psi_j(y)."""
    if t <= 0:
        raise ValueError("heat kernel requires t > 0")
    x = _as_finite_array(x)
    y = _as_finite_array(y)
    shape = np.broadcast_shapes(x.shape, y.shape)
    px = psi_batch(J, np.broadcast_to(x, shape).ravel())
    py = px if (x.shape == y.shape and np.array_equal(x, y)) \
        else psi_batch(J, np.broadcast_to(y, shape).ravel())
    damp = np.exp(-t * np.arange(J))
    return ((px * py).T @ damp).reshape(shape)


def psi_zero_abs(r_max):
    """|psi_{2r}(0)| for r = 0..r_max-1, via |psi_{2r}| = sqrt((2r-1)/(2r)) |psi_{2r-2}|."""
    out = np.empty(int(r_max))
    out[0] = _PSI0_COEF
    for r in range(1, int(r_max)):
        out[r] = out[r - 1] * math.sqrt((2 * r - 1) / (2.0 * r))
    return out


def psi_integral(m):
    """Lebesgue integral of psi_m over the line.

    Zero for odd m; for m = 2r the value is sqrt(2 pi) |psi_{2r}(0)| > 0.
    The sign convention was fixed against direct numerical integration
    (m = 0 gives sqrt(2 pi) pi^{-1/4}, m = 2 gives the positive value
    sqrt(2 pi) pi^{-1/4} / sqrt(2)).
    """
    m = int(m)
    if m < 0:
        raise ValueError("index must be non-negative")
    if m % 2 == 1:
        return 0.0
    return float(SQRT_2PI * psi_zero_abs(m // 2 + 1)[-1])


def psi_integral_batch(M):
    """Vector of psi_integral(m) for m = 0..M-1."""
    M = int(M)
    out = np.zeros(M)
    absvals = psi_zero_abs((M + 1) // 2 + 1)
    for m in range(0, M, 2):
        out[m] = SQRT_2PI * absvals[m // 2]
    return out
