"""Scattered-point quadrature: point sets, weight solves, and diagnostics."""

import math

import numpy as np
import pytest

from hermloc.hermite import psi_batch, psi_integral, space_dimension
from hermloc.integrate import oracle_rule
from hermloc.quadrature import (ALPHA_DEFAULT, CoverageConstants,
                                DiscreteMeasure, PointSet, QuadratureRule,
                                admissible_order, bounded_variation_check,
                                build_rule, density_content, load_rule,
                                moment_system, mz_sandwich_ratio,
                                range_truncation, regularity_norm, save_rule,
                                solve_mz_weights, verify_quadrature)

CONST = CoverageConstants()


def equispaced_points(n, alpha=ALPHA_DEFAULT, margin=1.0):
    halfwidth = CONST.a_n(n) + margin
    step = 0.999 * alpha / n
    m = int(np.ceil(halfwidth / step))
    return PointSet(np.arange(-m, m + 1) * step)


def test_point_set_basics():
    pts = PointSet.from_values([0.5, -1.0, 2.0])
    np.testing.assert_array_equal(pts.points, [-1.0, 0.5, 2.0])
    assert pts.m == 2
    np.testing.assert_allclose(pts.mass_points, [-1.0, 0.5])
    np.testing.assert_allclose(pts.gaps, [1.5, 1.5])
    assert pts.span == (-1.0, 2.0)


def test_point_set_rejects_bad_input():
    with pytest.raises(ValueError):
        PointSet(np.array([0.5, -1.0, 2.0]))   # constructor wants sorted input
    with pytest.raises(ValueError):
        PointSet.from_values([0.0, 1.0, 0.0])  # duplicates
    with pytest.raises(ValueError):
        PointSet(np.array([3.0]))


def test_point_set_from_file(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("# scattered nodes\n0.5\n-1.0\n\n2.0\n")
    pts = PointSet.from_file(path)
    np.testing.assert_array_equal(pts.points, [-1.0, 0.5, 2.0])


def test_density_content_is_max_gap():
    assert density_content(PointSet.from_values([0.0, 0.25, 1.0])) == 0.75
    with pytest.raises(ValueError):
        density_content(np.array([1.0]))


def test_discrete_measure():
    pts = PointSet(np.array([-1.0, 0.0, 2.0, 5.0]))
    mu = DiscreteMeasure(pts, np.array([0.5, -0.25, 1.0]))
    np.testing.assert_array_equal(mu.support, [-1.0, 0.0, 2.0])
    assert mu.total_variation == 1.75
    assert mu.integrate(lambda x: x) == pytest.approx(-0.5 + 2.0)
    with pytest.raises(ValueError):
        DiscreteMeasure(pts, np.array([1.0, 2.0]))


def test_regularity_norm():
    # one unit atom at scale t = 1: the atom-limit interval scores exactly 1
    one = DiscreteMeasure(PointSet(np.array([0.0, 1.0])), np.array([1.0]))
    assert regularity_norm(one, 1.0) == pytest.approx(1.0)
    # two half atoms further apart than 1/t: no interval beats the single atom
    two = DiscreteMeasure(PointSet(np.array([0.0, 10.0, 11.0])),
                          np.array([0.5, 0.5]))
    assert regularity_norm(two, 1.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        regularity_norm(one, 0.0)


def test_admissible_order_accepts_fine_equispaced():
    decision = admissible_order(equispaced_points(4), ALPHA_DEFAULT)
    assert decision.ok
    assert decision.n >= 4.0


def test_admissible_order_rejects_sparse():
    decision = admissible_order(PointSet(np.array([-1.0, 1.0])), ALPHA_DEFAULT)
    assert not decision.ok
    assert "coverage" in decision.message


def test_moment_system_shape_and_parity():
    h = np.arange(1, 13) * 0.25
    sym = np.concatenate([-h[::-1], [0.0], h])
    pts = PointSet(np.append(sym, 3.25))   # mass points are the symmetric part
    A, b = moment_system(pts, 2.0)
    rows = 2 * space_dimension(2.0) - 1
    assert A.shape == (rows, pts.m)
    assert b.shape == (rows,)
    # odd basis rows cancel on symmetric mass points and have zero targets
    assert abs(A[1] @ np.ones(pts.m)) < 1e-12
    assert b[1] == 0.0
    np.testing.assert_allclose(
        A[0], psi_batch(1, pts.mass_points * math.sqrt(2.0))[0])
    assert b[0] == pytest.approx(psi_integral(0) / math.sqrt(2.0))


def test_equispaced_rule_meets_bounds():
    pts = equispaced_points(4)
    rule = solve_mz_weights(pts, 4.0)
    assert rule.residual <= 1e-8
    assert not rule.flagged
    assert np.max(np.abs(rule.weights) / pts.gaps) <= 3.0
    assert np.sum(np.abs(rule.weights)) / 4.0 <= 5.0
    assert bounded_variation_check(rule) <= 5.0
    assert rule.regularity == pytest.approx(regularity_norm(rule.measure, 4.0))


def test_rule_integrates_weighted_products():
    rule = solve_mz_weights(equispaced_points(4), 4.0)
    defect = verify_quadrature(rule, trials=50, rng=np.random.default_rng(0xC0FFEE))
    assert defect <= 1e-7


def test_zeroed_weights_fail_verification():
    rule = solve_mz_weights(equispaced_points(4), 4.0)
    broken = QuadratureRule(
        measure=DiscreteMeasure(rule.measure.points,
                                np.zeros_like(rule.weights)),
        order=rule.order, residual=rule.residual, regularity=0.0)
    assert verify_quadrature(broken, trials=10,
                             rng=np.random.default_rng(0xC0FFEE)) > 0.1


def test_too_few_points_raise():
    pts = PointSet(np.linspace(-3, 3, 13))
    with pytest.raises(ValueError):
        solve_mz_weights(pts, 8.0)


def test_unmatchable_moments_get_flagged():
    # barely enough points, all inside [-2, 2]: full numerical rank but the
    # least-squares residual stays far above the moment tolerance
    pts = PointSet(np.linspace(-2, 2, 32))
    rule = solve_mz_weights(pts, 4.0)
    assert rule.flagged
    assert rule.residual > 1e-3


def test_degenerate_system_raises():
    pts = PointSet(np.linspace(-1, 1, 80))
    with pytest.raises(np.linalg.LinAlgError):
        solve_mz_weights(pts, 4.0)


def test_build_rule_routes_through_admissibility():
    decision, rule = build_rule(equispaced_points(4))
    assert decision.ok and rule is not None
    assert rule.order == pytest.approx(decision.n)
    assert rule.alpha_used == ALPHA_DEFAULT
    decision, rule = build_rule(PointSet(np.array([-1.0, 1.0])))
    assert not decision.ok and rule is None


def test_save_load_round_trip(tmp_path):
    rule = solve_mz_weights(equispaced_points(2), 2.0, alpha=ALPHA_DEFAULT)
    save_rule(rule, tmp_path / "rule")
    loaded = load_rule(tmp_path / "rule.json")
    np.testing.assert_array_equal(loaded.weights, rule.weights)
    np.testing.assert_array_equal(loaded.measure.points.points,
                                  rule.measure.points.points)
    assert loaded.order == rule.order
    assert loaded.alpha_used == rule.alpha_used
    d1 = verify_quadrature(rule, trials=20, rng=np.random.default_rng(7))
    d2 = verify_quadrature(loaded, trials=20, rng=np.random.default_rng(7))
    assert d1 == pytest.approx(d2, abs=1e-12)


def test_sandwich_ratio_tracks_oracle_norm():
    # x-scale grid fine enough for the Riemann comparison at order 4 sqrt(2)
    order = 4.0 * math.sqrt(2.0)
    alpha_x = math.sqrt(2.0) * ALPHA_DEFAULT
    halfwidth = CONST.a_n_x(order / math.sqrt(2.0)) + 1.0
    step = 0.999 * alpha_x / order
    m = int(np.ceil(halfwidth / step))
    xs = PointSet(np.arange(-m, m + 1) * step)
    dim = space_dimension(order)
    rng = np.random.default_rng(0xC0FFEE)
    yo, wo = oracle_rule()
    basis_oracle = psi_batch(dim, yo)
    basis_mass = psi_batch(dim, xs.mass_points)
    for _ in range(10):
        coeffs = rng.standard_normal(dim)
        discrete = mz_sandwich_ratio(xs, np.abs(coeffs @ basis_mass))
        exact = wo @ np.abs(coeffs @ basis_oracle)
        assert 0.75 <= discrete / exact <= 1.25


def test_sandwich_negative_control():
    # a 3-point set spanning [-0.1, 0.1] misses almost all order-4 mass
    xs = np.array([-0.1, 0.0, 0.1])
    dim = space_dimension(4.0)
    yo, wo = oracle_rule()
    basis_oracle = psi_batch(dim, yo)
    basis_mass = psi_batch(dim, xs[:-1])
    rng = np.random.default_rng(3)
    for _ in range(10):
        coeffs = rng.standard_normal(dim)
        ratio = (mz_sandwich_ratio(xs, np.abs(coeffs @ basis_mass))
                 / (wo @ np.abs(coeffs @ basis_oracle)))
        assert not 0.75 <= ratio <= 1.25


def test_sandwich_value_count_checked():
    with pytest.raises(ValueError):
        mz_sandwich_ratio(np.array([0.0, 1.0, 2.0]), np.array([1.0]))


def test_range_truncation():
    assert range_truncation(4.0) == (-9.0, 9.0)
    with pytest.raises(ValueError):
        range_truncation(0.0)
