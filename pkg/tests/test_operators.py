"""Projections, frame layers, and error estimates."""

import json
import math

import numpy as np
import pytest

from hermloc.hermite import (WeightedPolynomial, hermite_synthesis, psi_batch,
                             space_dimension)
from hermloc.integrate import make_grid
from hermloc.operators import (BUILTIN_NAMES, LEBESGUE, FrameDecomposition,
                               MeasureSequence, Projection, SampledFunction,
                               approx_error_estimate, builtin, decompose,
                               fourier_hermite, reconstruct, sigma, sigma_dx,
                               sigma_kernel_route, tau)
from hermloc.quadrature import ALPHA_DEFAULT, CoverageConstants, PointSet, \
    solve_mz_weights

CONST = CoverageConstants()


def equispaced_rule(n, margin=1.0):
    halfwidth = CONST.a_n(n) + margin
    step = 0.999 * ALPHA_DEFAULT / n
    m = int(np.ceil(halfwidth / step))
    return solve_mz_weights(PointSet(np.arange(-m, m + 1) * step), float(n))


def test_builtin_values_and_attributes():
    g = builtin("gaussian")
    assert g(0.0) == pytest.approx(1.0)
    assert g.support_halfwidth == 6.5
    s = builtin("sqrtabs_bump")
    assert s(0.25) == pytest.approx(0.5 * math.exp(-0.0625))
    assert builtin("f1_tapered").support_halfwidth == 17.0
    f2 = builtin("f2_tapered")
    assert f2.max_frequency == 4 ** 8
    psi3 = builtin("hermite:3")
    x = np.linspace(-2, 2, 9)
    np.testing.assert_array_equal(psi3(x), psi_batch(4, x)[3])
    assert psi3.support_halfwidth == pytest.approx(math.sqrt(6.0) + 8.0)


def test_builtin_errors():
    with pytest.raises(ValueError) as err:
        builtin("sinc")
    assert "gaussian" in str(err.value)
    with pytest.raises(ValueError):
        builtin("hermite:-1")
    assert set(BUILTIN_NAMES) >= {"gaussian", "sqrtabs_bump", "f1_tapered",
                                  "f2_tapered"}


def test_sampled_function_exact_lookup():
    f = SampledFunction(np.array([2.0, 0.0, 1.0]), np.array([20.0, 0.0, 10.0]))
    np.testing.assert_array_equal(f(np.array([1.0, 2.0, 0.0])), [10.0, 20.0, 0.0])
    with pytest.raises(ValueError):
        f(0.5)
    with pytest.raises(ValueError):
        SampledFunction(np.array([0.0, 0.0]), np.array([1.0, 2.0]))


def test_fourier_hermite_gaussian():
    # integral of exp(-x^2) psi_0 = pi^(-1/4) integral of exp(-3 x^2 / 2)
    coeffs = fourier_hermite(builtin("gaussian"), LEBESGUE, 8)
    c0 = math.pi ** (-0.25) * math.sqrt(2.0 * math.pi / 3.0)
    assert coeffs[0] == pytest.approx(c0, rel=1e-13)
    np.testing.assert_allclose(coeffs[1::2], 0.0, atol=1e-15)
    with pytest.raises(ValueError):
        fourier_hermite(builtin("gaussian"), LEBESGUE, 0)
    with pytest.raises(TypeError):
        fourier_hermite(builtin("gaussian"), "counting", 4)


def test_fourier_hermite_discrete_rule_recovers_coefficients():
    rule = equispaced_rule(4)
    P = WeightedPolynomial.random(4.0, np.random.default_rng(11))
    f = lambda x: hermite_synthesis(P.coeffs, x)
    coeffs = fourier_hermite(f, rule.measure, P.coeffs.size)
    np.testing.assert_allclose(coeffs, P.coeffs, atol=1e-9)


def test_sigma_reproduces_low_order_targets():
    # P in the filter plateau of sigma_4: coefficients pass through untouched
    P = WeightedPolynomial(np.array([0.3, -1.1, 0.0, 0.7]))
    f = lambda x: hermite_synthesis(P.coeffs, x)
    grid = make_grid(-6.0, 6.0, 0.05)
    proj = sigma(4.0, LEBESGUE, f, grid)
    assert proj.n == 4.0
    assert proj.coeffs.size == space_dimension(4.0)
    np.testing.assert_allclose(proj.coeffs[:4], P.coeffs, atol=1e-10)
    np.testing.assert_allclose(proj.values, f(grid), atol=1e-9)
    with pytest.raises(ValueError):
        sigma(0.0, LEBESGUE, f, grid)


def test_sigma_routes_agree():
    grid = make_grid(-4.0, 4.0, 0.25)
    direct = sigma(4.0, LEBESGUE, builtin("gaussian"), grid).values
    kernel = sigma_kernel_route(4.0, LEBESGUE, builtin("gaussian"), grid)
    np.testing.assert_allclose(kernel, direct, atol=1e-9)
    rule = equispaced_rule(4)
    direct_d = sigma(4.0, rule.measure, builtin("gaussian"), grid).values
    kernel_d = sigma_kernel_route(4.0, rule.measure, builtin("gaussian"), grid)
    np.testing.assert_allclose(kernel_d, direct_d, atol=1e-9)


def test_sigma_dx_matches_difference_quotient():
    grid = np.array([-1.3, 0.0, 0.9])
    h = 1e-6
    g = builtin("gaussian")
    deriv = sigma_dx(4.0, LEBESGUE, g, grid)
    num = (sigma(4.0, LEBESGUE, g, grid + h).values
           - sigma(4.0, LEBESGUE, g, grid - h).values) / (2 * h)
    np.testing.assert_allclose(deriv, num, atol=5e-7)


def test_projection_exports(tmp_path):
    grid = make_grid(-1.0, 1.0, 0.5)
    proj = sigma(2.0, LEBESGUE, builtin("gaussian"), grid)
    proj.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().strip().splitlines()
    assert lines[0] == "x,value"
    assert len(lines) == grid.size + 1
    assert float(lines[1].split(",")[0]) == -1.0
    proj.to_json(tmp_path / "p.json")
    payload = json.loads((tmp_path / "p.json").read_text())
    assert payload["order"] == 2.0
    restored = np.array([float(c) for c in payload["coefficients"]])
    np.testing.assert_array_equal(restored, proj.coeffs)


def test_measure_sequence_schedule():
    seq = MeasureSequence.lebesgue(3)
    assert len(seq) == 4
    assert seq.orders == (2.0, 4.0, 8.0, 16.0)
    assert seq.measure(2) is LEBESGUE
    with pytest.raises(ValueError):
        MeasureSequence(measures=(LEBESGUE, LEBESGUE), orders=(2.0, 3.0))
    with pytest.raises(ValueError):
        MeasureSequence(measures=(LEBESGUE,), orders=(2.0, 4.0))


def test_measure_sequence_from_rules():
    rules = [equispaced_rule(2), equispaced_rule(4)]
    seq = MeasureSequence.from_rules(rules)
    assert seq.orders == (2.0, 4.0)
    assert seq.measure(0) is rules[0].measure
    import dataclasses
    flagged = dataclasses.replace(rules[1], flagged=True)
    with pytest.raises(ValueError):
        MeasureSequence.from_rules([rules[0], flagged])


def test_tau_telescopes_to_projection():
    seq = MeasureSequence.lebesgue(3)
    grid = make_grid(-5.0, 5.0, 0.1)
    g = builtin("gaussian")
    total = sum(tau(seq, k, g, grid) for k in range(4))
    top = sigma(8.0, LEBESGUE, g, grid).values
    np.testing.assert_allclose(total, top, atol=1e-12)
    with pytest.raises(ValueError):
        tau(seq, -1, g, grid)


def test_decompose_structure_and_reconstruct():
    seq = MeasureSequence.lebesgue(3)
    grid = make_grid(-5.0, 5.0, 0.1)
    g = builtin("gaussian")
    dec = decompose(seq, g, grid, 3)
    assert isinstance(dec, FrameDecomposition)
    assert dec.levels == 3
    assert len(dec.layers) == 4
    assert [p.n for p in dec.projections] == [1.0, 2.0, 4.0, 8.0]
    np.testing.assert_allclose(reconstruct(dec), dec.projections[-1].values,
                               atol=1e-12)
    np.testing.assert_array_equal(dec.partial_sum(0), dec.layer(0))
    with pytest.raises(ValueError):
        decompose(seq, g, grid, 5)
    with pytest.raises(ValueError):
        decompose(seq, g, grid, -1)


def test_decompose_is_linear():
    seq = MeasureSequence.lebesgue(2)
    grid = make_grid(-4.0, 4.0, 0.25)
    g = builtin("gaussian")

    def twice(x):
        return 2.0 * g(x)
    twice.support_halfwidth = g.support_halfwidth   # identical quadrature window
    doubled = decompose(seq, twice, grid, 2)
    base = decompose(seq, g, grid, 2)
    for k in range(3):
        np.testing.assert_array_equal(doubled.layer(k), 2.0 * base.layer(k))


def test_frame_exports(tmp_path):
    seq = MeasureSequence.lebesgue(2)
    grid = make_grid(-2.0, 2.0, 0.5)
    dec = decompose(seq, builtin("gaussian"), grid, 2)
    dec.to_csv(tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().strip().splitlines()
    assert lines[0] == "x,tau_0,tau_1,tau_2"
    assert len(lines) == grid.size + 1
    dec.to_json(tmp_path / "d.json")
    payload = json.loads((tmp_path / "d.json").read_text())
    assert payload["levels"] == 2
    assert len(payload["coefficients"]) == 3
    assert len(payload["coefficients"][2]) == space_dimension(4.0)


def test_approx_error_estimate_shrinks_with_order():
    g = builtin("gaussian")
    errs = [approx_error_estimate(g, n, math.inf).value for n in (2.0, 4.0, 8.0)]
    assert all(e > 0 for e in errs)
    assert errs[2] < errs[0]
    est = approx_error_estimate(g, 4.0, math.inf)
    assert est.upper_scale == est.value
    assert est.lower == est.value
    assert est.n == 4.0 and est.p == math.inf
