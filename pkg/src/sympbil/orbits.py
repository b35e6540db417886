"""Variational search for maximizing periodic orbits.

Periodic orbits of rotation number 1/q are critical points of the cyclic
action sum(det(gamma(s_j), gamma(s_{j+1}))).  The symmetry reductions
mirror the structure of the symmetric maximizers: an axially symmetric
orbit through the marked point gamma(0) is determined by its parameters
in (0, 1/2); a centrally symmetric orbit by parameters in a half period
with s_{k} = s_0 + 1/2.  The reduced first-order conditions are exactly
the reflection residuals det(gamma(s_{j+1}) - gamma(s_{j-1}), gamma'(s_j)),
solved by a damped Newton iteration with a tridiagonal Jacobian and
ordering guards.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .curve import cross2

log = logging.getLogger(__name__)

#: solver target for the sup-norm of the reflection residual
RESIDUAL_TARGET = 1e-13
#: an orbit is accepted only if its residual is below this
RESIDUAL_LIMIT = 1e-10
MAX_NEWTON_ITER = 200


class OrbitError(RuntimeError):
    """Optimizer stagnation or ordering collapse; carries the last iterate."""

    def __init__(self, message, last_params=None):
        super().__init__(message)
        self.last_params = last_params


class RadonError(RuntimeError):
    """The curve is not Radon within tolerance."""


@dataclass
class PeriodicOrbit:
    q: int
    params: np.ndarray          # ordered lift, params[0] = anchor
    action: float
    symmetry: str               # axial-even | axial-odd | central | free
    residuals: np.ndarray       # reflection residual at every vertex
    max_residual: float         # over vertices that are true reflections
    iterations: int
    pinned: bool = False
    multiplicity: int = 1

    def spacings(self):
        """lambda_j = s_j - s_{j-1} for j = 1..q, with s_q = s_0 + 1."""
        lifted = np.append(self.params, self.params[0] + 1.0)
        return np.diff(lifted)


def action(curve, params):
    """Cyclic action sum(det(gamma(s_j), gamma(s_{j+1})))."""
    pts = curve.eval(np.asarray(params, dtype=float), 0)
    return float(np.sum(cross2(pts, np.roll(pts, -1, axis=0))))


def orbit_residuals(curve, params):
    """Reflection residual at every vertex of the closed polygon."""
    params = np.asarray(params, dtype=float)
    pts = curve.eval(params, 0)
    tangents = curve.eval(params, 1)
    chords = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    return cross2(chords, tangents)


def _solve_chain(curve, u0, left, right, gap, mirror_last=False):
    """Damped Newton on the reduced reflection system.

    Unknowns u_1..u_m between fixed anchors `left` and `right`; with
    mirror_last the rightmost neighbor is 1 - u_m instead of an anchor
    (odd axial reduction).  Returns (u, iterations).
    """
    u = np.array(u0, dtype=float)
    m = u.size

    def nodes(vec):
        if mirror_last:
            return np.concatenate(([left], vec, [1.0 - vec[-1]]))
        return np.concatenate(([left], vec, [right]))

    def residual(vec):
        p = nodes(vec)
        g0 = curve.eval(p, 0)
        g1 = curve.eval(p, 1)
        return cross2(g0[2:] - g0[:-2], g1[1:-1]), p, g0, g1

    def ordered(vec):
        p = nodes(vec) if not mirror_last else np.concatenate(([left], vec))
        hi = (1.0 - vec[-1]) if mirror_last else right
        return np.all(np.diff(p) > gap) and vec[-1] < hi - gap

    f, p, g0, g1 = residual(u)
    fnorm = np.max(np.abs(f))
    for it in range(1, MAX_NEWTON_ITER + 1):
        if fnorm < RESIDUAL_TARGET:
            return u, it - 1
        g2 = curve.eval(p, 2)
        chord = g0[2:] - g0[:-2]
        diag = cross2(chord, g2[1:-1])
        lower = -cross2(g1[:-2], g1[1:-1])
        upper = cross2(g1[2:], g1[1:-1])
        if mirror_last:
            # last equation also feels u_m through the mirrored neighbor
            diag[-1] -= cross2(g1[-1], g1[-2])
        ab = np.zeros((3, m))
        ab[0, 1:] = upper[:-1]
        ab[1, :] = diag
        ab[2, :-1] = lower[1:]
        try:
            step = solve_banded((1, 1), ab, f)
        except np.linalg.LinAlgError as exc:
            raise OrbitError(f"singular orbit Jacobian: {exc}", u) from exc
        alpha = 1.0
        for _ in range(50):
            trial = u - alpha * step
            if ordered(trial):
                f_t, p_t, g0_t, g1_t = residual(trial)
                fnorm_t = np.max(np.abs(f_t))
                if fnorm_t < fnorm or fnorm_t < RESIDUAL_TARGET:
                    u, f, p, g0, g1, fnorm = trial, f_t, p_t, g0_t, g1_t, fnorm_t
                    break
            alpha *= 0.5
        else:
            if fnorm < RESIDUAL_LIMIT:
                return u, it
            raise OrbitError(
                f"orbit search stagnated at residual {fnorm:.3e}", u)
    if fnorm < RESIDUAL_LIMIT:
        return u, MAX_NEWTON_ITER
    raise OrbitError(f"orbit search did not converge (residual {fnorm:.3e})", u)


def _finalize(curve, q, params, symmetry, iterations, pinned=False):
    params = np.asarray(params, dtype=float)
    res = orbit_residuals(curve, params)
    check = np.abs(res[1:]) if pinned else np.abs(res)
    max_res = float(np.max(check))
    if max_res > RESIDUAL_LIMIT:
        raise OrbitError(
            f"converged configuration violates the reflection conditions "
            f"({max_res:.3e}); is the curve {symmetry}-symmetric?", params)
    return PeriodicOrbit(q=q, params=params, action=action(curve, params),
                         symmetry=symmetry, residuals=res,
                         max_residual=max_res, iterations=iterations,
                         pinned=pinned)


def _ordering_gap(q):
    return 1e-4 / q


def maximize_axial(curve, q, n_starts=1, seed=0):
    """Maximizing axially symmetric orbit through the marked point gamma(0).

    The curve must be symmetric about the axis through gamma(0) and
    gamma(1/2).  For even q = 2k the orbit also passes through the
    auxiliary point; parameters with index > k are mirrors -s_j.  With
    n_starts > 1, jittered initializations probe for competing local
    maxima; the largest action wins and the multiplicity is logged.
    """
    if q < 3:
        raise ValueError("period must be at least 3")
    gap = _ordering_gap(q)
    k, odd = divmod(q, 2)

    def solve(u0):
        if odd:
            u, iters = _solve_chain(curve, u0, 0.0, None, gap, mirror_last=True)
            params = np.concatenate(([0.0], u, 1.0 - u[::-1]))
            return _finalize(curve, q, params, "axial-odd", iters)
        u, iters = _solve_chain(curve, u0, 0.0, 0.5, gap)
        params = np.concatenate(([0.0], u, [0.5], 1.0 - u[::-1]))
        return _finalize(curve, q, params, "axial-even", iters)

    base = np.arange(1, k + 1) / q if odd else np.arange(1, k) / q
    orbits = [solve(base)]
    if n_starts > 1:
        rng = np.random.default_rng(seed)
        span = 0.25 / q
        for _ in range(n_starts - 1):
            jitter = rng.uniform(-span, span, size=base.size)
            try:
                orbits.append(solve(np.sort(base + jitter)))
            except OrbitError:
                continue
        actions = np.array([o.action for o in orbits])
        distinct = np.unique(np.round(actions, 12)).size
        if distinct > 1:
            log.info("maximize_axial(q=%d): %d distinct local maxima found",
                     q, distinct)
        best = orbits[int(np.argmax(actions))]
        best.multiplicity = distinct
        return best
    return orbits[0]


def _central_half(curve, q, s0, gap):
    """Half-orbit chain between s0 and s0 + 1/2; returns (u, action, iters)."""
    k = q // 2
    u0 = s0 + np.arange(1, k) / q
    u, iters = _solve_chain(curve, u0, s0, s0 + 0.5, gap)
    half = np.concatenate(([s0], u, [s0 + 0.5]))
    pts = curve.eval(half, 0)
    half_action = float(np.sum(cross2(pts[:-1], pts[1:])))
    return u, 2.0 * half_action, iters


def maximize_central(curve, q, n_scan=None):
    """Maximizing centrally symmetric orbit, q even, center at the origin.

    The anchor s_0 of the half orbit is located by scanning the pinned
    action over [0, 1/2) and polishing the stationarity condition (the
    reflection residual at the anchor) with a bracketed root solve.  On
    rationally integrable curves the pinned action is flat and s_0 = 0
    is returned.
    """
    if q < 4 or q % 2:
        raise ValueError("central symmetry requires an even period >= 4")
    center = curve.point(0.0) + curve.point(0.5)
    if np.linalg.norm(center) > 1e-7:
        raise ValueError("curve is not centrally symmetric about the origin")
    gap = _ordering_gap(q)
    k = q // 2
    if n_scan is None:
        n_scan = max(33, 4 * k + 1)

    def assemble(s0):
        u, act, iters = _central_half(curve, q, s0, gap)
        params = np.concatenate(([s0], u, [s0 + 0.5], u + 0.5))
        return params, act, iters

    def anchor_residual(s0):
        u, _, _ = _central_half(curve, q, s0, gap)
        chord = curve.point(u[0]) - curve.point(u[-1] - 0.5)
        return float(cross2(chord, curve.eval(s0, 1)))

    grid = np.arange(n_scan) / n_scan * 0.5
    acts = np.empty(n_scan)
    for i, s0 in enumerate(grid):
        acts[i] = _central_half(curve, q, s0, gap)[1]
    spread = acts.max() - acts.min()
    if spread <= 1e-12 * max(1.0, abs(acts.max())):
        params, act, iters = assemble(0.0)
        return _finalize(curve, q, params, "central", iters)

    i_best = int(np.argmax(acts))
    lo = grid[(i_best - 1) % n_scan]
    hi = grid[(i_best + 1) % n_scan]
    if hi <= lo:
        hi += 0.5
    r_lo, r_hi = anchor_residual(lo), anchor_residual(hi)
    if r_lo == 0.0:
        s_best = lo
    elif r_hi == 0.0 or np.sign(r_lo) == np.sign(r_hi):
        s_best = grid[i_best]  # degenerate bracket; grid point is critical
    else:
        s_best = brentq(anchor_residual, lo, hi, xtol=1e-14)
    params, act, iters = assemble(s_best % 0.5)
    return _finalize(curve, q, params, "central", iters)


def maximize_free(curve, q, fixed_start=None):
    """Maximizing q-gon with one vertex pinned (s_0 = fixed_start or 0).

    Pinning resolves the rotational degeneracy of integrable curves; on
    non-integrable curves the reflection condition at the pinned vertex
    is generally nonzero and is excluded from max_residual (it is the
    integrability defect probed by `integrability_probe`).
    """
    if q < 3:
        raise ValueError("period must be at least 3")
    pinned = fixed_start is not None
    s0 = float(fixed_start) if pinned else 0.0
    gap = _ordering_gap(q)
    u0 = s0 + np.arange(1, q) / q
    u, iters = _solve_chain(curve, u0, s0, s0 + 1.0, gap)
    params = np.concatenate(([s0], u))
    return _finalize(curve, q, params, "free", iters, pinned=True)


def four_orbit_map(curve, s):
    """Next vertex phi(s) of the maximal inscribed parallelogram at gamma(s).

    For a centrally symmetric curve the parallelogram with vertex
    gamma(s) has vertices {s, t, s+1/2, t+1/2}; t maximizes
    det(gamma(s), gamma(t)) and solves det(gamma(s), gamma'(t)) = 0 on
    (s, s+1/2).  On a Radon curve this configuration is a 4-periodic
    orbit; `four_orbit_residual` measures the defect otherwise.
    """
    base = curve.point(s)

    def h(t):
        return float(cross2(base, curve.eval(t, 1)))

    lo, hi = s + 1e-9, s + 0.5 - 1e-9
    h_lo = h(lo)
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if np.sign(h(mid)) == np.sign(h_lo):
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(50):
        step = h(t) / float(cross2(base, curve.eval(t, 2)))
        t -= step
        if abs(step) < 1e-14:
            break
    else:
        raise OrbitError("four-orbit map did not converge")
    return t % 1.0


def four_orbit_residual(curve, s):
    """Reflection residual at gamma(s) of the parallelogram configuration."""
    t = four_orbit_map(curve, s)
    return float(cross2(2.0 * curve.point(t), curve.eval(s, 1)))


def radon_anchor(curve, tol=1e-9, n_grid=64):
    """Smallest anchor s >= 0 with phi(s) = s + 1/4.

    Located by the sign change of phi(s) - s - 1/4; on curves where the
    defect vanishes identically (conics) the anchor is 0.  Raises
    RadonError if there is no sign change or the anchored parallelogram
    fails the reflection condition.
    """
    grid = np.arange(n_grid) / n_grid * 0.5
    psi = np.array([four_orbit_map(curve, s) - s - 0.25 for s in grid])
    if np.max(np.abs(psi)) <= tol:
        return 0.0
    signs = np.sign(psi)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if flips.size == 0:
        raise RadonError("no anchored 4-orbit: the curve is not Radon "
                         "within tolerance")
    i = int(flips[0])
    s_bar = brentq(lambda s: four_orbit_map(curve, s) - s - 0.25,
                   grid[i], grid[i + 1], xtol=1e-14)
    if abs(four_orbit_residual(curve, s_bar)) > tol:
        raise RadonError("anchored parallelogram is not a billiard orbit; "
                         "the curve is not Radon within tolerance")
    return float(s_bar)


def integrability_probe(curve, q, n_pins=32):
    """Spread of pinned maximal actions against the symmetric maximizer.

    Near zero signals an invariant curve of q-periodic points (the
    actions do not depend on the starting point).
    """
    if q % 2:
        raise ValueError("the probe is defined for even periods")
    reference = maximize_central(curve, q).action
    worst = 0.0
    for i in range(n_pins):
        pin = i / n_pins
        try:
            pinned = maximize_free(curve, q, fixed_start=pin)
        except OrbitError as exc:
            raise OrbitError(f"pinned orbit failed at s0={pin}: {exc}",
                             exc.last_params) from exc
        worst = max(worst, abs(pinned.action - reference))
    return worst
