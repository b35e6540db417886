"""Affine-arc-length parametrization: closed-form oracles and invariants."""

import numpy as np
import pytest

from sympbil import (
    ConvexityError,
    CurveSpec,
    UNIT_CIRCLE_CURVATURE,
    UNIT_CIRCLE_RADIUS,
    affine_perimeter,
    build_affine_curve,
    normalize_unit_perimeter,
)
from sympbil.curve import frame_residuals, frame_tolerance

R = UNIT_CIRCLE_RADIUS
TWO_PI = 2.0 * np.pi


def random_unimodular(seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.uniform(-0.5, 0.5, 3)
    return np.array([[1.0 + a, b], [c, (1.0 + b * c) / (1.0 + a)]])


# -- affine perimeter -------------------------------------------------------


def test_perimeter_unit_circle():
    # lambda = 2 pi R^(2/3); R = (2 pi)^(-3/2) solves lambda = 1
    assert affine_perimeter(CurveSpec.circle(R)) == pytest.approx(1.0, abs=1e-13)


def test_perimeter_ellipse_closed_form():
    # det(x', x'') = a b for the ellipse, so lambda = 2 pi (a b)^(1/3)
    lam = affine_perimeter(CurveSpec.ellipse(2.0, 1.0))
    assert lam == pytest.approx(2.0 * np.pi * 2.0 ** (1.0 / 3.0), rel=1e-13)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_perimeter_unimodular_invariance(seed):
    spec = CurveSpec.radial(1.0, cos=(1e-2, 0.0, 5e-3))
    mapped = spec.transformed(random_unimodular(seed), shift=(0.3, -0.1))
    assert affine_perimeter(mapped) == pytest.approx(affine_perimeter(spec),
                                                     rel=1e-12)


def test_perimeter_rejects_nonconvex():
    with pytest.raises(ConvexityError) as err:
        affine_perimeter(CurveSpec.radial(1.0, cos=(0.0, 0.4)))
    assert err.value.theta_bad is not None and err.value.theta_bad.size > 0


# -- normalization ----------------------------------------------------------


def test_normalize_ellipse_closed_form():
    spec = normalize_unit_perimeter(CurveSpec.ellipse(2.0, 1.0))
    # scale factor lambda^(-3/2) gives a' = sqrt(2) (2 pi)^(-3/2)
    assert spec.a == pytest.approx(np.sqrt(2.0) * R, rel=1e-12)
    assert spec.b == pytest.approx(R / np.sqrt(2.0), rel=1e-12)
    assert spec.a * spec.b == pytest.approx((2.0 * np.pi) ** -3, rel=1e-12)


def test_normalize_circle_radius():
    spec = normalize_unit_perimeter(CurveSpec.circle(1.0))
    assert spec.a == pytest.approx(R, rel=1e-12)


def test_normalize_idempotent():
    spec = normalize_unit_perimeter(CurveSpec.ellipse(2.0, 1.0))
    again = normalize_unit_perimeter(spec)
    assert again.a == pytest.approx(spec.a, abs=1e-15)
    assert again.b == pytest.approx(spec.b, abs=1e-15)
    assert affine_perimeter(again) == pytest.approx(1.0, abs=1e-12)


# -- build ------------------------------------------------------------------


def test_circle_affine_curvature(circle_curve):
    assert np.max(np.abs(circle_curve.k_values - UNIT_CIRCLE_CURVATURE)) < 1e-8


def test_ellipse_affine_curvature_constant(ellipse_curve):
    # k = (a b)^(-2/3) is the same constant as the circle's
    assert np.max(np.abs(ellipse_curve.k_values - UNIT_CIRCLE_CURVATURE)) < 1e-8


def test_circle_parametrization_closed_form(circle_curve):
    s = circle_curve.s_grid
    expect = R * np.stack([np.cos(TWO_PI * s), np.sin(TWO_PI * s)], axis=-1)
    assert np.max(np.linalg.norm(circle_curve.derivs[0] - expect, axis=1)) < 1e-12


def test_build_rejects_small_n():
    with pytest.raises(ValueError):
        build_affine_curve(CurveSpec.unit_circle(), 32)


def test_build_rejects_non_unit_perimeter():
    with pytest.raises(ValueError, match="perimeter"):
        build_affine_curve(CurveSpec.circle(1.0), 256)


# -- eval -------------------------------------------------------------------


def test_eval_first_derivative_at_zero(circle_curve):
    g1 = circle_curve.eval(0.0, 1)
    assert np.linalg.norm(g1) == pytest.approx((2.0 * np.pi) ** -0.5, rel=1e-12)
    assert g1[0] == pytest.approx(0.0, abs=1e-12)
    assert g1[1] > 0.0


def test_eval_periodicity(axial_curve):
    assert np.allclose(axial_curve.point(0.0), axial_curve.point(1.0),
                       atol=1e-13)


def test_eval_half_turn(circle_curve):
    assert circle_curve.point(0.5) == pytest.approx([-R, 0.0], abs=1e-12)


def test_eval_rejects_high_order(circle_curve):
    with pytest.raises(ValueError):
        circle_curve.eval(0.1, 4)


def test_eval_interpolation_accuracy(circle_curve):
    # off-grid evaluation against the closed form; spectral, far below N^-4
    s = np.linspace(0.0, 1.0, 7, endpoint=False) + 1.3e-4
    expect = R * np.stack([np.cos(TWO_PI * s), np.sin(TWO_PI * s)], axis=-1)
    assert np.max(np.abs(circle_curve.eval(s, 0) - expect)) < 1e-12


# -- opposite point ---------------------------------------------------------


def test_opposite_on_circle(circle_curve):
    for s in (0.0, 0.17, 0.83):
        assert circle_curve.opposite_point(s) == pytest.approx((s + 0.5) % 1.0,
                                                               abs=1e-12)


def test_opposite_on_centrally_symmetric(central_curve):
    for s in (0.05, 0.42):
        s_star = central_curve.opposite_point(s)
        assert s_star == pytest.approx((s + 0.5) % 1.0, abs=1e-10)
        g1 = central_curve.eval(np.array([s, s_star]), 1)
        assert abs(g1[0, 0] * g1[1, 1] - g1[0, 1] * g1[1, 0]) < 1e-10


def test_opposite_involution(axial_curve):
    for s in (0.08, 0.31, 0.66):
        twice = axial_curve.opposite_point(axial_curve.opposite_point(s))
        assert (twice - s + 0.5) % 1.0 - 0.5 == pytest.approx(0.0, abs=1e-11)


# -- circle distance --------------------------------------------------------


def test_circle_distance_self(circle_curve):
    assert circle_curve.circle_distance() < 1e-8


def test_circle_distance_zero_coefficients():
    spec = normalize_unit_perimeter(CurveSpec.radial(1.0, cos=(0.0, 0.0)))
    assert build_affine_curve(spec, 1024).circle_distance() < 1e-8


def test_circle_distance_monotone():
    def dist(eps):
        spec = normalize_unit_perimeter(CurveSpec.radial(1.0, cos=(0.0, eps)))
        return build_affine_curve(spec, 1024).circle_distance()

    d1, d2 = dist(1e-3), dist(2e-3)
    assert 0.0 < d1 < d2


# -- frame invariants -------------------------------------------------------


@pytest.mark.parametrize("n", [4096])
def test_frame_residuals_at_4096(axial_spec, n):
    curve = build_affine_curve(axial_spec, n)
    r1, r2 = frame_residuals(curve)
    assert r1 <= 1e-8
    assert r2 <= 1e-6


def test_tangent_acceleration_orthogonality(axial_curve):
    # det(gamma', gamma''') = 0 in the affine parametrization
    from sympbil.curve import cross2
    vals = cross2(axial_curve.derivs[1], axial_curve.derivs[3])
    assert np.max(np.abs(vals)) < 1e-8


def test_build_rejects_nonconvex():
    spec = CurveSpec.radial((2.0 * np.pi) ** -1.5, cos=(0.0, 0.4))
    with pytest.raises(ConvexityError):
        build_affine_curve(spec, 256)


def test_frame_residuals_within_budget(axial_spec):
    for n in (256, 1024, 4096):
        curve = build_affine_curve(axial_spec, n)
        r1, r2 = frame_residuals(curve)
        assert max(r1, r2) <= frame_tolerance(n)


def test_frame_residuals_doubling(axial_spec):
    # analytic sampling leaves the residuals at roundoff, so the 8x
    # reduction is checked against that floor
    floor = 5e-13
    r_n = max(frame_residuals(build_affine_curve(axial_spec, 512)))
    r_2n = max(frame_residuals(build_affine_curve(axial_spec, 1024)))
    assert r_2n <= max(r_n / 8.0, floor)


@pytest.mark.parametrize("seed", [3, 4])
def test_affine_curvature_equivariance(axial_spec, seed):
    base = build_affine_curve(axial_spec, 1024)
    mapped = build_affine_curve(axial_spec.transformed(random_unimodular(seed)),
                                1024)
    assert np.max(np.abs(base.k_values - mapped.k_values)) < 1e-8


def test_tangent_norm_is_curvature_radius_power(ellipse_curve):
    # |gamma'| = rho^(1/3): check against the Euclidean curvature of the
    # ellipse computed from the generator
    s = np.array([0.0, 0.2, 0.45])
    g1 = ellipse_curve.eval(s, 1)
    a, b = ellipse_curve.spec.a, ellipse_curve.spec.b
    theta = ellipse_curve.theta(s)
    rho = (a * a * np.sin(theta) ** 2 + b * b * np.cos(theta) ** 2) ** 1.5 / (a * b)
    assert np.max(np.abs(np.linalg.norm(g1, axis=1) - rho ** (1.0 / 3.0))) < 1e-10


def test_shift_origin_preserves_geometry():
    spec = normalize_unit_perimeter(CurveSpec.radial(1.0, cos=(2e-3, 1e-3)))
    shifted = spec.shift_origin(0.7)
    assert affine_perimeter(shifted) == pytest.approx(1.0, abs=1e-10)
    c0 = build_affine_curve(spec, 1024)
    c1 = build_affine_curve(shifted, 1024)
    # same point set: the shifted curve starts where theta = 0.7 sat before
    target = c0.point(np.interp(0.7, c0.theta_values, c0.s_grid))
    assert np.linalg.norm(c1.point(0.0) - target) < 1e-8
