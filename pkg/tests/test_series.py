import numpy as np
import pytest

from fieldplace.density import exact_density_from_rects
from fieldplace.series import (
    SpectralCoefficients,
    coefficient_ops,
    coefficients_by_quadrature,
    density_mode_integrals,
    eval_field,
    eval_point_ops,
    eval_potential,
    exact_coefficients,
    series_abs_bound,
    tail_bound,
)

from conftest import random_density


def unit_block():
    return exact_density_from_rects([0.5], [0.5], [0.5], [0.5], (1.0, 1.0))


def test_empty_density_zero_coefficients():
    d = exact_density_from_rects([], [], [], [], (1.0, 1.0))
    c = exact_coefficients(d, 8)
    assert not c.a.any()


def test_full_region_block_zero_coefficients():
    d = exact_density_from_rects([0.5], [0.5], [1.0], [1.0], (1.0, 1.0))
    c = exact_coefficients(d, 8)
    np.testing.assert_allclose(c.a, 0.0, atol=1e-15)


def test_centered_block_hand_values():
    c = exact_coefficients(unit_block(), 4)
    assert c.a[0, 0] == 0.0
    assert c.a[1, 0] == pytest.approx(0.0, abs=1e-15)  # odd mode of a symmetric density
    assert c.a[2, 0] == pytest.approx(-1.0 / (4 * np.pi**3), rel=1e-12)


def test_quadrature_matches_closed_form():
    for seed in range(3):
        d = random_density(seed)
        ce = exact_coefficients(d, 16)
        cq = coefficients_by_quadrature(d, 16, 1024)
        scale = np.abs(ce.a).max()
        assert np.abs(ce.a - cq.a).max() <= 1e-4 * scale


def test_quadrature_empty_density():
    d = exact_density_from_rects([], [], [], [], (1.0, 1.0))
    cq = coefficients_by_quadrature(d, 8, 128)
    assert not cq.a.any()


def test_quadrature_constant_mode_forced_zero():
    cq = coefficients_by_quadrature(random_density(1), 8, 256)
    assert cq.a[0, 0] == 0.0


def test_quadrature_resolution_guard():
    with pytest.raises(ValueError):
        coefficients_by_quadrature(unit_block(), 64, 128)


def test_rectangular_region_consistency():
    # closed forms carry W != H through correctly
    d = exact_density_from_rects([1.0], [0.6], [0.8], [0.5], (4.0, 2.0))
    ce = exact_coefficients(d, 12)
    cq = coefficients_by_quadrature(d, 12, 1024)
    assert np.abs(ce.a - cq.a).max() <= 1e-4 * np.abs(ce.a).max()


def test_laplacian_mode_consistency():
    # mode (u,p) of the density recovered by scaling the potential coefficient
    d = random_density(7)
    K = 16
    a = exact_coefficients(d, K).a
    integ = density_mode_integrals(d, K, 1024)
    u = np.arange(1, K + 1, dtype=float)
    lam = np.add.outer(u**2 * np.pi**2 / d.W**2, u**2 * np.pi**2 / d.H**2)
    lhs = a[1:, 1:] * lam
    rhs = 4.0 / (d.W * d.H) * integ[1:, 1:]
    assert np.abs(lhs - rhs).max() <= 1e-4 * np.abs(rhs).max()


def test_superposition():
    d1 = random_density(11, n=4)
    d2 = random_density(12, n=5)
    both = exact_density_from_rects(
        np.concatenate([d1.x, d2.x]),
        np.concatenate([d1.y, d2.y]),
        np.concatenate([d1.w, d2.w]),
        np.concatenate([d1.h, d2.h]),
        (1.0, 1.0),
    )
    a_sum = exact_coefficients(d1, 10).a + exact_coefficients(d2, 10).a
    np.testing.assert_allclose(exact_coefficients(both, 10).a, a_sum, atol=1e-14)


def test_eval_potential_zero_coefficients():
    c = SpectralCoefficients(4, np.zeros((5, 5)), 1.0, 1.0)
    assert eval_potential(c, 0.3, 0.7) == 0.0


def test_eval_potential_single_mode():
    a = np.zeros((3, 3))
    a[1, 0] = 1.0
    c = SpectralCoefficients(2, a, 2.0, 1.0)
    xs = np.linspace(0, 2, 9)
    np.testing.assert_allclose(eval_potential(c, xs, np.full(9, 0.5)), np.cos(np.pi * xs / 2))


def test_eval_potential_zero_mean():
    d = random_density(3)
    c = exact_coefficients(d, 12)
    g = (np.arange(128) + 0.5) / 128
    gx, gy = np.meshgrid(g, g, indexing="ij")
    psi = eval_potential(c, gx.ravel(), gy.ravel())
    assert abs(psi.mean()) <= 1e-9 * np.abs(psi).max()


def test_eval_outside_region():
    c = SpectralCoefficients(2, np.zeros((3, 3)), 1.0, 1.0)
    with pytest.raises(ValueError):
        eval_potential(c, 1.2, 0.5)
    with pytest.raises(ValueError):
        eval_field(c, 0.5, -0.1)


def test_eval_field_single_mode():
    a = np.zeros((3, 3))
    a[1, 0] = 1.0
    c = SpectralCoefficients(2, a, 2.0, 3.0)
    xs = np.linspace(0, 2, 7)
    fx, fy = eval_field(c, xs, np.full(7, 1.0))
    np.testing.assert_allclose(fx, (np.pi / 2) * np.sin(np.pi * xs / 2))
    np.testing.assert_allclose(fy, 0.0, atol=1e-15)


def test_field_vanishes_on_boundary():
    d = random_density(4)
    c = exact_coefficients(d, 32)
    ys = np.linspace(0, 1, 50)
    for x_edge in (0.0, 1.0):
        fx, _ = eval_field(c, np.full(50, x_edge), ys)
        assert np.abs(fx).max() <= 1e-12
    for y_edge in (0.0, 1.0):
        _, fy = eval_field(c, ys, np.full(50, y_edge))
        assert np.abs(fy).max() <= 1e-12


def test_field_is_negative_potential_gradient():
    d = random_density(6)
    c = exact_coefficients(d, 24)
    rng = np.random.default_rng(0)
    pts = rng.uniform(0.05, 0.95, (30, 2))
    h = 1e-5
    dpsi_dx = (eval_potential(c, pts[:, 0] + h, pts[:, 1]) - eval_potential(c, pts[:, 0] - h, pts[:, 1])) / (2 * h)
    dpsi_dy = (eval_potential(c, pts[:, 0], pts[:, 1] + h) - eval_potential(c, pts[:, 0], pts[:, 1] - h)) / (2 * h)
    fx, fy = eval_field(c, pts[:, 0], pts[:, 1])
    scale = max(np.abs(fx).max(), np.abs(fy).max())
    assert np.abs(fx + dpsi_dx).max() <= 1e-6 * scale
    assert np.abs(fy + dpsi_dy).max() <= 1e-6 * scale


def test_tail_bound_empty():
    d = exact_density_from_rects([], [], [], [], (1.0, 1.0))
    assert tail_bound(d, 4).bound == 0.0


def test_tail_bound_monotone():
    d = random_density(2)
    bounds = [tail_bound(d, k).bound for k in (1, 2, 4, 8, 16, 32, 64)]
    assert all(b1 >= b2 for b1, b2 in zip(bounds, bounds[1:]))
    assert all(b >= 0 for b in bounds)


def test_tail_bound_covers_partial_sum_gap():
    d = random_density(8)
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 1, (100, 2))
    for K in (8, 16):
        cK = exact_coefficients(d, K)
        c4 = exact_coefficients(d, 4 * K)
        gap = np.abs(
            eval_potential(cK, pts[:, 0], pts[:, 1]) - eval_potential(c4, pts[:, 0], pts[:, 1])
        ).max()
        assert gap <= tail_bound(d, K).bound


def test_abs_coefficient_sums_bounded():
    d = random_density(9)
    bound = series_abs_bound(d)
    sums = [np.abs(exact_coefficients(d, K).a).sum() for K in (2, 4, 8, 16, 32, 64)]
    assert all(s1 <= s2 + 1e-15 for s1, s2 in zip(sums, sums[1:]))  # non-decreasing
    assert sums[-1] <= bound


def test_partial_sum_cost_model():
    # evaluation cost is quadratic in the truncation order, coefficient
    # construction is linear in blocks and quadratic in order
    assert eval_point_ops(64) / eval_point_ops(32) == pytest.approx(4.0, rel=0.1)
    assert coefficient_ops(64, 1000) / coefficient_ops(32, 1000) == pytest.approx(4.0, rel=0.1)
    assert coefficient_ops(32, 2000) / coefficient_ops(32, 1000) == pytest.approx(2.0)
