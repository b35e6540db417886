"""Symplectic billiard map: generating function, step, inverse, residuals."""

import numpy as np
import pytest

from sympbil import (
    BilliardDomainError,
    UNIT_CIRCLE_RADIUS,
    generating_action,
    reflection_residual,
    step,
    step_back,
)
from sympbil.orbits import maximize_axial

R = UNIT_CIRCLE_RADIUS


def test_generating_action_perpendicular_radii(circle_curve):
    assert generating_action(circle_curve, 0.0, 0.25) == pytest.approx(
        R * R, rel=1e-12)


def test_generating_action_antisymmetric(axial_curve):
    rng = np.random.default_rng(5)
    for s_x, s_y in rng.uniform(0.0, 1.0, (8, 2)):
        w = generating_action(axial_curve, s_x, s_y)
        assert generating_action(axial_curve, s_y, s_x) == pytest.approx(
            -w, abs=1e-15)
    assert generating_action(axial_curve, 0.37, 0.37) == 0.0


@pytest.mark.parametrize("p, expect", [((0.0, 0.1), (0.1, 0.2)),
                                       ((0.0, 0.25), (0.25, 0.5))])
def test_step_on_circle(circle_curve, p, expect):
    # on the circle the arc symmetry gives s_z = 2 s_y - s_x
    out = step(circle_curve, p)
    assert out.s_x == pytest.approx(expect[0], abs=1e-12)
    assert out.s_y == pytest.approx(expect[1], abs=1e-12)


def test_step_on_ellipse(ellipse_curve):
    # gamma(s) = (a cos 2 pi s, b sin 2 pi s): det(gamma(1/2) - gamma(0),
    # gamma'(1/4)) = 0 analytically
    out = step(ellipse_curve, (0.0, 0.25))
    assert out.s_y == pytest.approx(0.5, abs=1e-11)


def test_step_back_on_circle(circle_curve):
    out = step_back(circle_curve, (0.1, 0.2))
    assert (out.s_x + 0.5) % 1.0 - 0.5 == pytest.approx(0.0, abs=1e-11)
    assert out.s_y == pytest.approx(0.1, abs=1e-12)


@pytest.mark.parametrize("p", [(0.12, 0.31), (0.7, 0.93)])
def test_step_roundtrip(central_curve, p):
    forward = step(central_curve, p)
    back = step_back(central_curve, forward)
    assert back.s_x == pytest.approx(p[0], abs=1e-9)
    assert back.s_y == pytest.approx(p[1], abs=1e-9)


def test_step_roundtrip_ellipse(ellipse_curve):
    rng = np.random.default_rng(11)
    for _ in range(5):
        s_x = rng.uniform(0.0, 1.0)
        s_y = s_x + rng.uniform(0.05, 0.4)
        forward = step(ellipse_curve, (s_x, s_y % 1.0))
        back = step_back(ellipse_curve, forward)
        assert (back.s_x - s_x + 0.5) % 1.0 - 0.5 == pytest.approx(0.0, abs=1e-10)


def test_reflection_residual_circle(circle_curve):
    assert abs(reflection_residual(circle_curve, 0.0, 0.1, 0.2)) < 1e-12
    assert abs(reflection_residual(circle_curve, 0.0, 0.1, 0.25)) > 1e-4


def test_reflection_residual_converged_orbit(axial_curve):
    orbit = maximize_axial(axial_curve, 9)
    s = orbit.params
    for j in range(9):
        r = reflection_residual(axial_curve, s[j - 1], s[j], s[(j + 1) % 9])
        assert abs(r) <= 1e-10


def test_twist_monotonicity(central_curve):
    s_y = np.linspace(0.05, 0.45, 25)
    z = [step(central_curve, (0.0, t)).s_y for t in s_y]
    assert np.all(np.diff(z) > 0.0)


def test_two_periodic_configuration(circle_curve, central_curve):
    # (x, x*) chords are 2-periodic: the residual of the degenerate triple
    # vanishes identically
    for curve in (circle_curve, central_curve):
        s_star = curve.opposite_point(0.2)
        assert abs(reflection_residual(curve, 0.2, s_star, 0.2 + 1.0)) < 1e-12


def test_step_continuous_toward_opposite(circle_curve):
    # approaching y -> x*, the image z -> x continuously
    for eps in (1e-2, 1e-3):
        out = step(circle_curve, (0.0, 0.5 - eps))
        assert out.s_y == pytest.approx(1.0 - 2.0 * eps, abs=1e-10)


def test_step_continuous_toward_diagonal(circle_curve):
    # Phi(x, x) = (x, x) is approached continuously
    for eps in (1e-2, 2e-3):
        out = step(circle_curve, (0.0, eps))
        assert out.s_y == pytest.approx(2.0 * eps, abs=1e-10)


def test_step_commutes_with_unimodular_maps(circle_curve, ellipse_curve):
    # the unit-perimeter ellipse is diag(a/R, b/R) of the circle with
    # det = 1, and the affine parametrization transports: identical
    # parameter dynamics
    for p in ((0.1, 0.23), (0.6, 0.81)):
        out_c = step(circle_curve, p)
        out_e = step(ellipse_curve, p)
        assert out_c.s_y == pytest.approx(out_e.s_y, abs=1e-11)


def test_step_rejects_degenerate_inputs(circle_curve):
    with pytest.raises(BilliardDomainError):
        step(circle_curve, (0.0, 1e-8))
    with pytest.raises(BilliardDomainError):
        step(circle_curve, (0.0, 0.5))  # y = x* exactly
