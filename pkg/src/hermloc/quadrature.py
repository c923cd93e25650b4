"""Scattered-point quadrature exact for products of weighted polynomials.

Given points fine enough for order n (max consecutive gap <= alpha / n, span
covering the oscillation region), the minimum-norm solution of the moment
system

    sum_k w_k psi_m(y_k sqrt(2)) = 2^{-1/2} integral of psi_m,   m < 2 ceil(n^2) - 1

is a rule whose defect vanishes on every product P Q with P, Q in the span of
{psi_j : sqrt(j) < n}: such a product is itself a weighted polynomial in the
sqrt(2)-rescaled basis, so exactness on the basis moments is exactness on all
products.  Minimizing the Euclidean norm keeps the weights Riemann-like: the
solution lies in the row space of the moment matrix, hence decays where every
basis function decays.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .hermite import (WeightedPolynomial, hermite_synthesis, psi_batch,
                      psi_integral_batch, space_dimension)
from .integrate import oracle_rule

# calibrated defaults; see the validation suites for the experiments that fix them
ALPHA_DEFAULT = 0.5
COVERAGE_C_DEFAULT = 1.0


@dataclass(frozen=True)
class PointSet:
    """Strictly increasing finite points y_1 < ... < y_{M+1}; the first M carry
    quadrature mass, the last one closes the final gap."""

    points: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.points, dtype=float))
        if p.ndim != 1 or p.size < 2:
            raise ValueError("a point set needs at least two points")
        if not np.all(np.isfinite(p)):
            raise ValueError("points must be finite")
        if not np.all(np.diff(p) > 0):
            raise ValueError("points must be strictly increasing")
        object.__setattr__(self, "points", p)

    @classmethod
    def from_values(cls, values):
        """Sort raw values; duplicate abscissae are a data error."""
        v = np.sort(np.asarray(values, dtype=float).ravel())
        if v.size >= 2 and np.any(np.diff(v) == 0):
            raise ValueError("duplicate points in input")
        return cls(v)

    @classmethod
    def from_file(cls, path):
        """One real per line; blank lines and '#' comments skipped."""
        vals = []
        with open(path) as fh:
            for line in fh:
                s = line.strip()
                if s and not s.startswith("#"):
                    vals.append(float(s))
        return cls.from_values(vals)

    @property
    def m(self):
        return self.points.size - 1

    @property
    def mass_points(self):
        return self.points[:-1]

    @property
    def gaps(self):
        return np.diff(self.points)

    @property
    def span(self):
        return float(self.points[0]), float(self.points[-1])


def density_content(points):
    """Fineness measure of a point set: the maximal consecutive gap."""
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, float)
    if pts.size < 2:
        raise ValueError("density content needs at least two points")
    return float(np.max(np.diff(pts)))


@dataclass(frozen=True)
class DiscreteMeasure:
    """Signed atomic measure: mass weights[k] at points.mass_points[k]."""

    points: PointSet
    weights: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if w.shape != (self.points.m,):
            raise ValueError("need one weight per mass point")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "weights", w)

    @property
    def support(self):
        return self.points.mass_points

    @property
    def total_variation(self):
        return float(np.sum(np.abs(self.weights)))

    def integrate(self, f):
        return float(self.weights @ f(self.support))


def regularity_norm(measure, t):
    """sup over centers x and radii r of |nu|(B(x, r)) / (r + 1/t).

    Centers run over the support; radii over the atom limit r -> 0 plus the
    dyadic family 2^k / t, k = -2 .. ceil(log2(span * t)).  The atom limit is
    what makes a single unit mass at scale t = 1 score exactly 1.
    """
    if t <= 0:
        raise ValueError("scale t must be positive")
    y = measure.support
    absw = np.abs(measure.weights)
    cum = np.concatenate([[0.0], np.cumsum(absw)])
    span = float(y[-1] - y[0]) if y.size > 1 else 0.0
    radii = [0.0]
    k_top = 0 if span * t <= 1 else int(math.ceil(math.log2(span * t)))
    radii += [2.0 ** k / t for k in range(-2, k_top + 1)]
    best = 0.0
    for r in radii:
        lo = np.searchsorted(y, y - r, side="left")
        hi = np.searchsorted(y, y + r, side="right")
        mass = cum[hi] - cum[lo]
        best = max(best, float(np.max(mass)) / (r + 1.0 / t))
    return best


@dataclass(frozen=True)
class CoverageConstants:
    """Edge constants for the coverage requirement.

    The oscillation region of {psi_j : sqrt(j) < n} ends near n sqrt(2); the
    n^(-4/3) correction widens it past the soft edge by the width of the Airy
    transition zone.  c_deriv is the analogous (larger) constant used for
    derivative-sensitive work.
    """

    c: float = COVERAGE_C_DEFAULT
    c_deriv: float = COVERAGE_C_DEFAULT * 2.0 ** (2.0 / 3.0)

    def a_n(self, n):
        """Half-width that points must cover for order n (y-scale)."""
        return n * math.sqrt(2.0) * (1.0 + self.c * n ** (-4.0 / 3.0))

    def a_n_x(self, n):
        """Same region after the sqrt(2) rescale (x-scale)."""
        return math.sqrt(2.0) * self.a_n(n)

    def b_n(self, n):
        return n * math.sqrt(2.0) * (1.0 + self.c_deriv * n ** (-4.0 / 3.0))


@dataclass(frozen=True)
class OrderDecision:
    """Outcome of admissible_order: a value, never an exception, so callers can
    report coverage problems instead of dying."""

    ok: bool
    n: float
    required_halfwidth: float
    span: tuple
    message: str = ""


def admissible_order(points, alpha, constants=None):
    """Largest order the point set supports at density ratio alpha.

    n = alpha / (max gap); the decision fails when [-A_n, A_n] is not inside
    the covered span.
    """
    if not 0 < alpha:
        raise ValueError("alpha must be positive")
    constants = constants or CoverageConstants()
    pts = points if isinstance(points, PointSet) else PointSet.from_values(points)
    delta = density_content(pts)
    n = alpha / delta
    a = constants.a_n(n)
    lo, hi = pts.span
    if lo <= -a and hi >= a:
        return OrderDecision(True, n, a, (lo, hi))
    return OrderDecision(False, n, a, (lo, hi),
                         f"points span [{lo:g}, {hi:g}] but order {n:g} "
                         f"needs coverage of [-{a:g}, {a:g}]")


@dataclass(frozen=True)
class QuadratureRule:
    """A discrete measure with a certified product-exactness order."""

    measure: DiscreteMeasure
    order: float
    residual: float          # max absolute moment defect
    regularity: float        # regularity_norm at scale t = order
    alpha_used: float = float("nan")
    flagged: bool = False

    @property
    def points(self):
        return self.measure.support

    @property
    def weights(self):
        return self.measure.weights


# moment defects are flagged relative to the largest |target moment|
MOMENT_RTOL = 1e-8


def moment_system(points, n):
    """The matrix A[m, k] = psi_m(y_k sqrt(2)) and target vector b."""
    pts = points if isinstance(points, PointSet) else PointSet.from_values(points)
    rows = 2 * space_dimension(n) - 1
    A = psi_batch(rows, pts.mass_points * math.sqrt(2.0))
    b = psi_integral_batch(rows) / math.sqrt(2.0)
    return A, b


def solve_mz_weights(points, n, alpha=float("nan"), moment_rtol=MOMENT_RTOL):
    """Minimum-norm weights matching all product moments of order n.

    Raises on a rank-deficient moment system (points too sparse or badly
    placed); a rule whose residual exceeds the tolerance is returned but
    flagged.
    """
    pts = points if isinstance(points, PointSet) else PointSet.from_values(points)
    A, b = moment_system(pts, n)
    if pts.m < A.shape[0]:
        raise ValueError(f"need at least {A.shape[0]} mass points for order {n:g}, "
                         f"got {pts.m}")
    w, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < A.shape[0]:
        raise np.linalg.LinAlgError(
            f"moment system rank {rank} < {A.shape[0]}: point set cannot "
            f"support order {n:g}")
    residual = float(np.max(np.abs(A @ w - b)))
    measure = DiscreteMeasure(pts, w)
    return QuadratureRule(measure=measure, order=float(n), residual=residual,
                          regularity=regularity_norm(measure, float(n)),
                          alpha_used=float(alpha),
                          flagged=bool(residual > moment_rtol * np.max(np.abs(b))))


def build_rule(points, alpha=ALPHA_DEFAULT, constants=None):
    """admissible_order then solve; returns (decision, rule-or-None)."""
    decision = admissible_order(points, alpha, constants)
    if not decision.ok:
        return decision, None
    return decision, solve_mz_weights(points, decision.n, alpha=alpha)


def verify_quadrature(rule, trials=50, rng=None):
    """Max normalized product defect over random pairs from the certified span.

    For each trial, P and Q get standard-normal coefficients on
    {psi_j : sqrt(j) < n}; the defect |I(PQ) - sum w PQ| is normalized by
    ||P||_2 ||Q||_2.  The Lebesgue side comes from the reference panel
    integrator, not from coefficient identities, so the check is independent
    of the construction.
    """
    rng = np.random.default_rng(rng)
    n = rule.order
    xo, wo = oracle_rule()
    y = rule.points
    worst = 0.0
    for _ in range(int(trials)):
        P = WeightedPolynomial.random(n, rng)
        Q = WeightedPolynomial.random(n, rng)
        exact = float(wo @ (hermite_synthesis(P.coeffs, xo) * hermite_synthesis(Q.coeffs, xo)))
        approx = float(rule.weights @ (hermite_synthesis(P.coeffs, y) * hermite_synthesis(Q.coeffs, y)))
        worst = max(worst, abs(exact - approx) / (P.l2_norm * Q.l2_norm))
    return worst


def bounded_variation_check(rule, beta=1.0):
    """Total weight variation scaled by order^beta; O(1) for healthy rules."""
    return rule.measure.total_variation / rule.order ** beta


def mz_sandwich_ratio(x_points, values):
    """Riemann-sum-to-integral ratio used by the comparison inequality.

    x_points are the rescaled abscissae x_k = y_k sqrt(2); values are |R(x_k)|
    for the first M points.  Returns sum_k (x_{k+1} - x_k) |R(x_k)| as is; the
    caller divides by the true integral of |R|.
    """
    pts = x_points.points if isinstance(x_points, PointSet) else np.asarray(x_points, float)
    v = np.asarray(values, dtype=float)
    if v.shape != (pts.size - 1,):
        raise ValueError("need one value per mass point")
    return float(np.sum(np.diff(pts) * np.abs(v)))


def range_truncation(n, p=None):
    """Integration window outside which nothing of order n has appreciable mass.

    Valid for every p-norm, hence the unused p in the signature.
    """
    if n <= 0:
        raise ValueError("order must be positive")
    return (-(2.0 * n + 1.0), 2.0 * n + 1.0)


def save_rule(rule, base_path):
    """Write <base>.csv (y_k, w_k rows; closing point carries weight 0) and
    <base>.json (header).  Full 17-digit decimals so a round trip is exact."""
    base = str(base_path)
    if base.endswith(".csv") or base.endswith(".json"):
        base = base.rsplit(".", 1)[0]
    pts = rule.measure.points.points
    w = rule.weights
    with open(base + ".csv", "w") as fh:
        fh.write("y,w\n")
        for k in range(pts.size - 1):
            fh.write(f"{pts[k]:.17g},{w[k]:.17g}\n")
        fh.write(f"{pts[-1]:.17g},0\n")
    header = {
        "order": rule.order,
        "residual": rule.residual,
        "regularity_norm": rule.regularity,
        "alpha_used": None if math.isnan(rule.alpha_used) else rule.alpha_used,
        "flagged": rule.flagged,
        "points": int(pts.size),
    }
    with open(base + ".json", "w") as fh:
        json.dump(header, fh, indent=2)
        fh.write("\n")
    return base + ".csv", base + ".json"


def load_rule(base_path):
    """Inverse of save_rule."""
    base = str(base_path)
    if base.endswith(".csv") or base.endswith(".json"):
        base = base.rsplit(".", 1)[0]
    ys, ws = [], []
    with open(base + ".csv") as fh:
        next(fh)
        for line in fh:
            a, b = line.strip().split(",")
            ys.append(float(a))
            ws.append(float(b))
    with open(base + ".json") as fh:
        header = json.load(fh)
    measure = DiscreteMeasure(PointSet(np.array(ys)), np.array(ws[:-1]))
    alpha = header.get("alpha_used")
    return QuadratureRule(measure=measure, order=float(header["order"]),
                          residual=float(header["residual"]),
                          regularity=float(header["regularity_norm"]),
                          alpha_used=float("nan") if alpha is None else float(alpha),
                          flagged=bool(header["flagged"]))
