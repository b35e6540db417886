"""The symplectic billiard map on the positive phase space.

A phase point is an ordered pair (s_x, s_y) of boundary parameters with
x < y < x* in cyclic order (x* the opposite point of x).  The map sends
(x, y) to (y, z) where the chord z - x is parallel to the tangent at y;
its generating function is omega(x, y) = det(x, y).
"""

from typing import NamedTuple

import numpy as np

from .curve import cross2

#: inputs closer than this to the diagonal (or to (x, x*)) are rejected;
#: the map degenerates continuously there
MIN_SEPARATION = 1e-6


class PhasePoint(NamedTuple):
    s_x: float
    s_y: float


class BilliardDomainError(ValueError):
    """Input pair outside the open positive phase space."""


def generating_action(curve, s_x, s_y):
    """det(gamma(s_x), gamma(s_y)); antisymmetric in its arguments."""
    return float(cross2(curve.point(s_x), curve.point(s_y)))


def reflection_residual(curve, s_prev, s_cur, s_next):
    """det(gamma(s_next) - gamma(s_prev), gamma'(s_cur)).

    Vanishes exactly when the triple is a symplectic billiard
    configuration (the chord skips the middle point along its tangent).
    """
    chord = curve.point(s_next) - curve.point(s_prev)
    return float(cross2(chord, curve.eval(s_cur, 1)))


def _chord_root(curve, base_point, tangent_dir, lo, hi):
    """Root of det(gamma(u) - base_point, tangent_dir) on (lo, hi).

    g changes sign exactly once on the bracket (the line through
    base_point parallel to tangent_dir meets the boundary twice, and the
    bracket isolates the far intersection).  Bisection to 1e-3, then
    Newton polished to ~1e-13 in the parameter.
    """
    def g(u):
        return cross2(curve.point(u) - base_point, tangent_dir)

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise BilliardDomainError(
            "root bracketing failed; the phase point is degenerate "
            f"(minimum separation {MIN_SEPARATION:g})")
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            lo = hi = mid
            break
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    for _ in range(50):
        slope = cross2(curve.eval(u, 1), tangent_dir)
        step = g(u) / slope
        u_new = u - step
        if not lo - 1e-3 <= u_new <= hi + 1e-3:
            u_new = 0.5 * (lo + hi)  # fall back into the bracket
        if abs(u_new - u) < 1e-13:
            return u_new
        u = u_new
    return u


def _validate(curve, s_x, s_y):
    """Lift s_y into (s_x, s_x + 1) and check x < y < x* with margin."""
    b = s_x + (s_y - s_x) % 1.0
    s_star = s_x + (curve.opposite_point(s_x) - s_x) % 1.0
    if not (s_x + MIN_SEPARATION <= b <= s_star - MIN_SEPARATION):
        raise BilliardDomainError(
            "phase point outside the open positive phase space "
            f"(minimum separation {MIN_SEPARATION:g})")
    return b


def step(curve, p):
    """One iteration of the symplectic billiard map, (x, y) -> (y, z)."""
    s_x, s_y = p
    b = _validate(curve, s_x, s_y)
    tangent = curve.eval(b, 1)
    z = _chord_root(curve, curve.point(s_x), tangent,
                    b + 1e-12, s_x + 1.0 - 1e-12)
    return PhasePoint(float(s_y % 1.0), float(z % 1.0))


def step_back(curve, p):
    """Inverse map, (y, z) -> (x, y): same chord condition solved backward."""
    s_y, s_z = p
    z = s_y + (s_z - s_y) % 1.0
    tangent = curve.eval(s_y, 1)
    x = _chord_root(curve, curve.point(z), tangent,
                    z - 1.0 + 1e-12, s_y - 1e-12)
    # sanity: y must lie in the positive phase space of the recovered x
    _validate(curve, x, s_y)
    return PhasePoint(float(x % 1.0), float(s_y % 1.0))
