"""Named, runnable property suites.

Each suite ties one implemented inequality or identity to a measured value and
a threshold, so a single report answers "does this build still satisfy the
contract".  Thresholds are the acceptance values; random draws come from a
recorded seed, so every report is reproducible bit for bit.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import modulus
from .filters import LocalizedKernel, kernel_dx_matrix, kernel_matrix
from .hermite import (WeightedPolynomial, heat_kernel_closed,
                      heat_kernel_series, hermite_synthesis,
                      hermite_synthesis_dx, psi_batch, psi_derivative_batch,
                      space_dimension)
from .integrate import make_grid, oracle_rule
from .operators import (LEBESGUE, MeasureSequence, approx_error_estimate,
                        builtin, decompose, sigma)
from .quadrature import (ALPHA_DEFAULT, CoverageConstants, PointSet,
                         admissible_order, bounded_variation_check,
                         mz_sandwich_ratio, solve_mz_weights,
                         verify_quadrature)

DEFAULT_SEED = 0xC0FFEE


@dataclass(frozen=True)
class Check:
    description: str
    value: float
    threshold: float
    passed: bool


def _leq(description, value, threshold):
    return Check(description, float(value), float(threshold),
                 bool(value <= threshold))


def _geq(description, value, threshold):
    return Check(description, float(value), float(threshold),
                 bool(value >= threshold))


@dataclass(frozen=True)
class SuiteReport:
    """One suite's checks plus the context needed to reproduce them."""

    suite: str
    seed: int
    seconds: float
    checks: tuple
    params: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "seconds": self.seconds,
            "passed": self.passed,
            "params": self.params,
            "checks": [
                {"description": c.description, "value": f"{c.value:.17g}",
                 "threshold": f"{c.threshold:.17g}", "passed": c.passed}
                for c in self.checks
            ],
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def summary(self):
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.suite} "
                 f"({self.seconds:.2f} s, seed {self.seed})"]
        for c in self.checks:
            mark = "ok " if c.passed else "BAD"
            lines.append(f"  {mark} {c.description}: {c.value:.6g} "
                         f"(threshold {c.threshold:.6g})")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# shared helpers

def _equispaced_for_order(n, alpha=ALPHA_DEFAULT, margin=1.0):
    """Equispaced point set fine and wide enough to certify order n."""
    constants = CoverageConstants()
    halfwidth = constants.a_n(n) + margin
    step = 0.999 * alpha / n
    pts = PointSet(np.arange(-halfwidth, halfwidth + step / 2.0, step))
    decision = admissible_order(pts, alpha, constants)
    if not (decision.ok and decision.n >= n):
        raise RuntimeError(f"internal: constructed set rejected: {decision.message}")
    return pts


def _battery():
    """Ten decaying targets with broad coefficient spectra for frame-ratio
    stability: assorted bump shapes plus kink, corner and cusp singularities."""
    return {
        "gaussian": lambda x: np.exp(-x ** 2),
        "shifted_gaussian": lambda x: np.exp(-(x - 1.0) ** 2),
        "narrow_gaussian": lambda x: np.exp(-2.0 * x ** 2),
        "x_gaussian": lambda x: x * np.exp(-x ** 2),
        "two_bumps": lambda x: np.exp(-x ** 2) + 0.5 * np.exp(-2.0 * (x - 2.0) ** 2),
        "sech": lambda x: 1.0 / np.cosh(x),
        "rational": lambda x: 1.0 / (1.0 + x ** 2),
        "abs_kink": lambda x: np.abs(x) * np.exp(-x ** 2),
        "exp_abs": lambda x: np.exp(-np.abs(x)),
        "sqrt_singular": builtin("sqrtabs_bump"),
    }


# ---------------------------------------------------------------------------
# suites

def _suite_orthonormality(rng):
    x, w = oracle_rule()
    stack = psi_batch(65, x)
    gram = (stack * w) @ stack.T
    defect = float(np.max(np.abs(gram - np.eye(65))))
    return [_leq("max |<psi_j, psi_l> - delta_jl| for j, l <= 64", defect, 1e-8)], {}


def _suite_mehler(rng):
    g = np.linspace(-3.0, 3.0, 25)
    X, Y = np.meshgrid(g, g)
    checks = []
    for t in (0.1, 0.2, 0.5, 1.0):
        J = int(math.ceil(40.0 / t))
        closed = heat_kernel_closed(X, Y, t)
        series = heat_kernel_series(X, Y, t, J)
        scale = float(np.max(np.abs(closed)))
        overall = float(np.max(np.abs(series - closed))) / scale
        checks.append(_leq(f"t={t:g}: scale-normalized series/closed-form error",
                           overall, 1e-8))
        mask = np.abs(closed) >= 1e-5 * scale
        pointwise = float(np.max(np.abs((series[mask] - closed[mask]) / closed[mask])))
        checks.append(_leq(f"t={t:g}: pointwise rel err where |K| >= 1e-5 max",
                           pointwise, 1e-8))
    return checks, {"grid": "25x25 on [-3,3]^2"}


def _suite_reproduction(rng):
    checks = []
    for n in (4, 8, 16):
        grid = make_grid(-(2.0 * n + 1.0), 2.0 * n + 1.0, 0.05)
        pts = _equispaced_for_order(n)
        rule = solve_mz_weights(pts, n, alpha=ALPHA_DEFAULT)
        worst_leb = 0.0
        worst_mz = 0.0
        for _ in range(50):
            P = WeightedPolynomial.random(n / 2.0, rng)
            target = P(grid)
            sup = float(np.max(np.abs(target)))
            leb = sigma(n, LEBESGUE, P, grid).values
            mz = sigma(n, rule.measure, P, grid).values
            worst_leb = max(worst_leb, float(np.max(np.abs(leb - target))) / sup)
            worst_mz = max(worst_mz, float(np.max(np.abs(mz - target))) / sup)
        checks.append(_leq(f"n={n}: Lebesgue sup error / ||P||_inf", worst_leb, 1e-8))
        checks.append(_leq(f"n={n}: solved-rule sup error / ||P||_inf", worst_mz, 1e-6))
    return checks, {"trials": 50, "alpha": ALPHA_DEFAULT}


_LOCALIZATION_EXPONENT = 6


def _normalized_kernel_sup(n, grid, exponent):
    kern = LocalizedKernel(float(n))
    dist = np.abs(grid[:, None] - grid[None, :])
    weight = np.maximum(1.0, (n * dist) ** exponent)
    K = kernel_matrix(kern, grid, grid)
    dK = kernel_dx_matrix(kern, grid, grid)
    return (float(np.max(np.abs(K) * weight)) / n,
            float(np.max(np.abs(dK) * weight)) / n ** 2)


def _suite_localization(rng):
    grid = make_grid(-4.0, 4.0, 0.02)
    sups = {n: _normalized_kernel_sup(n, grid, _LOCALIZATION_EXPONENT)
            for n in (8, 16, 32)}
    growth = sups[32][0] / sups[8][0]
    growth_dx = sups[32][1] / sups[8][1]
    checks = [
        _leq("sup |K_n| max(1,(n d)^6)/n growth, n=8 -> 32", growth, 2.0),
        _leq("sup |dK_n/dx| max(1,(n d)^6)/n^2 growth, n=8 -> 32", growth_dx, 2.0),
    ]
    params = {f"normalized_sup_n{n}": s[0] for n, s in sups.items()}
    params.update({f"normalized_dx_sup_n{n}": s[1] for n, s in sups.items()})
    return checks, params


def _suite_bernstein(rng):
    ratios = {}
    for n in (4, 8, 16, 32):
        halfwidth = math.sqrt(2.0) * n + 4.0
        step = math.pi / (math.sqrt(2.0) * n) / 8.0
        grid = make_grid(-halfwidth, halfwidth, step)
        J = space_dimension(n)
        coeffs = rng.standard_normal((100, J))
        values = coeffs @ psi_batch(J, grid)
        derivs = coeffs @ psi_derivative_batch(J, grid)
        per_poly = np.max(np.abs(derivs), axis=1) / (n * np.max(np.abs(values), axis=1))
        ratios[n] = float(np.max(per_poly))
    checks = [_leq(f"max ||P'||/(n ||P||) growth, n={a} -> {b}",
                   ratios[b] / ratios[a], 1.5)
              for a, b in ((4, 8), (8, 16), (16, 32))]
    return checks, {"trials": 100, "ratios": {str(n): r for n, r in ratios.items()}}


def _suite_quadrature(rng):
    checks = []
    for n in (2, 4, 8):
        pts = _equispaced_for_order(n)
        rule = solve_mz_weights(pts, n, alpha=ALPHA_DEFAULT)
        defect = verify_quadrature(rule, trials=50, rng=rng)
        per_gap = float(np.max(np.abs(rule.weights) / pts.gaps))
        variation = bounded_variation_check(rule, beta=1.0)
        checks.append(_leq(f"n={n}: moment residual", rule.residual, 1e-8))
        checks.append(_leq(f"n={n}: random-product defect / ||P|| ||Q||", defect, 1e-7))
        checks.append(_leq(f"n={n}: max |w_k| / local gap", per_gap, 3.0))
        checks.append(_leq(f"n={n}: total weight variation / n", variation, 5.0))
    return checks, {"alpha": ALPHA_DEFAULT, "trials": 50}


def _suite_mz_sandwich(rng):
    checks = []
    alpha_x = math.sqrt(2.0) * ALPHA_DEFAULT
    constants = CoverageConstants()
    for n in (4, 8):
        order = n * math.sqrt(2.0)
        halfwidth = math.sqrt(2.0) * constants.a_n(order) + 1.0
        step = 0.999 * alpha_x / order
        pts = PointSet(np.arange(-halfwidth, halfwidth + step / 2.0, step))
        xo, wo = oracle_rule()
        lo, hi = 1.0, 1.0
        for _ in range(50):
            P = WeightedPolynomial.random(order, rng)
            riemann = mz_sandwich_ratio(pts, np.abs(P(pts.mass_points)))
            exact = float(wo @ np.abs(P(xo)))
            ratio = riemann / exact
            lo, hi = min(lo, ratio), max(hi, ratio)
        checks.append(_geq(f"order n={order:.4g}: min Riemann/integral ratio", lo, 0.75))
        checks.append(_leq(f"order n={order:.4g}: max Riemann/integral ratio", hi, 1.25))
    return checks, {"alpha": ALPHA_DEFAULT, "alpha_x_scale": alpha_x, "trials": 50}


def _suite_frame(rng):
    f = builtin("gaussian")
    grid = make_grid(-8.0, 8.0, 0.01)
    aleph = MeasureSequence.lebesgue(5)
    dec = decompose(aleph, f, grid, 5)
    target = f(grid)
    recon_err = float(np.max(np.abs(dec.partial_sum() - target))
                      / np.max(np.abs(target)))
    telescope = float(np.max(np.abs(dec.partial_sum() - dec.projections[-1].values)))
    checks = [
        _leq("||f - sum tau_k||_inf / ||f||_inf, f = exp(-x^2), 5 levels",
             recon_err, 1e-3),
        _leq("telescoping |sum tau_k - sigma_32 f|", telescope, 1e-10),
    ]
    xo, wo = oracle_rule()
    ratios = []
    for name, g in _battery().items():
        gx = np.asarray(g(xo), dtype=float)
        denom = float(wo @ (gx * gx))
        layers = decompose(aleph, g, xo, 5).layers
        num = float(sum(wo @ (lay * lay) for lay in layers))
        ratios.append(num / denom)
    med = float(np.median(ratios))
    checks.append(_geq("frame ratio battery: min ratio / median", min(ratios) / med, 0.8))
    checks.append(_leq("frame ratio battery: max ratio / median", max(ratios) / med, 1.2))
    return checks, {"battery_size": len(ratios), "median_ratio": med,
                    "ratios": [f"{r:.6f}" for r in sorted(ratios)]}


def _suite_christoffel(rng):
    grid = make_grid(-10.0, 10.0, 0.05)
    sums, dx_sums = {}, {}
    for u in (4, 8, 16):
        J = space_dimension(u)
        stack = psi_batch(J, grid)
        dstack = psi_derivative_batch(J, grid)
        sums[u] = float(np.max(np.sum(stack ** 2, axis=0))) / u
        dx_sums[u] = float(np.max(np.sum(dstack ** 2, axis=0))) / u ** 3
    var = (max(sums.values()) - min(sums.values())) / min(sums.values())
    var_dx = (max(dx_sums.values()) - min(dx_sums.values())) / min(dx_sums.values())
    checks = [
        _leq("sup_x sum psi_j(x)^2 / u: variation across u in {4,8,16}", var, 0.25),
        _leq("sup_x sum psi_j'(x)^2 / u^3: variation across u in {4,8,16}",
             var_dx, 0.25),
    ]
    return checks, {"sums": {str(u): s for u, s in sums.items()},
                    "dx_sums": {str(u): s for u, s in dx_sums.items()}}


def _suite_modulus(rng):
    f = builtin("gaussian")
    fitted = {}
    for n in (4, 8, 16):
        r_n = approx_error_estimate(f, n, float("inf")).value
        omega = modulus(f, float("inf"), 2, 1.0 / n)
        fitted[n] = r_n / omega
    checks = [_leq(f"fitted direct-estimate constant growth, n={a} -> {b}",
                   fitted[b] / fitted[a], 1.5)
              for a, b in ((4, 8), (8, 16))]
    psi0 = builtin("hermite:0")
    omegas = [modulus(psi0, float("inf"), 1, d) for d in (0.2, 0.1, 0.05)]
    shrink = max(omegas[1] / omegas[0], omegas[2] / omegas[1])
    checks.append(_leq("omega_1(psi_0, delta) shrink factor per halving", shrink, 1.05))
    return checks, {"fitted_constants": {str(n): c for n, c in fitted.items()},
                    "psi0_omegas": [f"{v:.6g}" for v in omegas]}


_SUITES = {
    "orthonormality": _suite_orthonormality,
    "mehler": _suite_mehler,
    "localization": _suite_localization,
    "reproduction": _suite_reproduction,
    "bernstein": _suite_bernstein,
    "mz_sandwich": _suite_mz_sandwich,
    "quadrature": _suite_quadrature,
    "frame": _suite_frame,
    "christoffel": _suite_christoffel,
    "modulus": _suite_modulus,
}

SUITE_NAMES = tuple(_SUITES)


def run_suite(name, seed=DEFAULT_SEED):
    """Run one named suite with a fresh generator seeded as recorded."""
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; known: {', '.join(SUITE_NAMES)}")
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    checks, params = _SUITES[name](rng)
    elapsed = time.perf_counter() - start
    return SuiteReport(suite=name, seed=int(seed), seconds=float(elapsed),
                       checks=tuple(checks), params=params)


def run_all(seed=DEFAULT_SEED):
    """All suites in declaration order; each gets its own seeded generator."""
    return tuple(run_suite(name, seed) for name in SUITE_NAMES)
