"""Affine-arc-length parametrization of strictly convex planar boundaries.

A boundary is described analytically by a `CurveSpec` (ellipse or
Fourier-perturbed circle, optionally composed with an affine map).  The
equi-affine arc length element is ds = det(x', x'')^(1/3) dtheta, which is
invariant under unimodular linear maps; `build_affine_curve` integrates it
spectrally, inverts theta(s) by Newton, and samples gamma and its first
three s-derivatives from the analytic generator.  In this parametrization

    det(gamma', gamma'') = 1,   det(gamma', gamma''') = 0,
    gamma''' = -k gamma',       |gamma'| = rho^(1/3),

with k the affine curvature and rho the Euclidean curvature radius.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._fourier import TrigSeries, invert_monotone

TWO_PI = 2.0 * np.pi

#: affine curvature of every unit-affine-perimeter conic
UNIT_CIRCLE_CURVATURE = TWO_PI ** 2

#: radius of the circle with affine perimeter 1
UNIT_CIRCLE_RADIUS = TWO_PI ** -1.5

MIN_SAMPLES = 64


class ConvexityError(ValueError):
    """Raised when the generator fails strict convexity (kappa <= 0)."""

    def __init__(self, message, theta_bad=None):
        super().__init__(message)
        self.theta_bad = np.asarray(theta_bad) if theta_bad is not None else None


def cross2(u, v):
    """z-component of the cross product of planar vectors (last axis = 2)."""
    u = np.asarray(u)
    v = np.asarray(v)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


@dataclass(frozen=True)
class CurveSpec:
    """Analytic generator of a convex boundary.

    kind == "ellipse":        x(theta) = (a cos theta, b sin theta)
    kind == "radial-fourier": x(theta) = r(theta) (cos theta, sin theta),
        r(theta) = r0 (1 + sum_m cos_coeffs[m-1] cos(m theta)
                         + sum_m sin_coeffs[m-1] sin(m theta))

    An optional affine pre-transform (matrix, shift) is applied on top,
    x -> M x + v, and is stored symbolically so unimodular invariance
    holds exactly.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    r0: float = 0.0
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()
    matrix: tuple = None
    shift: tuple = None

    @classmethod
    def ellipse(cls, a, b):
        if a <= 0 or b <= 0:
            raise ValueError("ellipse semi-axes must be positive")
        return cls(kind="ellipse", a=float(a), b=float(b))

    @classmethod
    def circle(cls, radius):
        return cls.ellipse(radius, radius)

    @classmethod
    def unit_circle(cls):
        return cls.circle(UNIT_CIRCLE_RADIUS)

    @classmethod
    def radial(cls, r0, cos=(), sin=()):
        if r0 <= 0:
            raise ValueError("base radius must be positive")
        return cls(kind="radial-fourier", r0=float(r0),
                   cos_coeffs=tuple(float(c) for c in cos),
                   sin_coeffs=tuple(float(c) for c in sin))

    # -- affine bookkeeping ------------------------------------------------

    def transform_arrays(self):
        m = np.array(self.matrix, dtype=float) if self.matrix is not None else np.eye(2)
        v = np.array(self.shift, dtype=float) if self.shift is not None else np.zeros(2)
        return m, v

    def transformed(self, matrix=None, shift=None):
        """Compose a new affine map applied after the existing one."""
        m_new = np.array(matrix, dtype=float) if matrix is not None else np.eye(2)
        v_new = np.array(shift, dtype=float) if shift is not None else np.zeros(2)
        m_old, v_old = self.transform_arrays()
        m = m_new @ m_old
        v = m_new @ v_old + v_new
        return replace(self, matrix=tuple(map(tuple, m)), shift=tuple(v))

    def scaled(self, c):
        """Dilate the whole boundary by c (affine length scales by c^(2/3))."""
        if c <= 0:
            raise ValueError("scale factor must be positive")
        out = self
        if self.kind == "ellipse":
            out = replace(out, a=self.a * c, b=self.b * c)
        else:
            out = replace(out, r0=self.r0 * c)
        if self.shift is not None:
            out = replace(out, shift=tuple(c * np.array(self.shift)))
        return out

    def shift_origin(self, dtheta):
        """Re-seat the generator parameter, theta -> theta + dtheta.

        The geometry is unchanged; only where theta = 0 (hence s = 0)
        sits on the boundary moves.
        """
        if dtheta == 0.0:
            return self
        if self.kind == "ellipse":
            # (a cos(t+d), b sin(t+d)) = M_d (a cos t, b sin t), det M_d = 1
            cd, sd = np.cos(dtheta), np.sin(dtheta)
            m_d = np.array([[cd, -self.a / self.b * sd],
                            [self.b / self.a * sd, cd]])
            m_old, v_old = self.transform_arrays()
            return replace(self, matrix=tuple(map(tuple, m_old @ m_d)))
        m = np.arange(1, max(len(self.cos_coeffs), len(self.sin_coeffs)) + 1)
        c = np.zeros(m.size)
        s = np.zeros(m.size)
        c[:len(self.cos_coeffs)] = self.cos_coeffs
        s[:len(self.sin_coeffs)] = self.sin_coeffs
        cm, sm = np.cos(m * dtheta), np.sin(m * dtheta)
        # r(theta + d) e(theta + d) = Rot(d) [r(theta + d) e(theta)]
        cd, sd = np.cos(dtheta), np.sin(dtheta)
        m_old, _ = self.transform_arrays()
        rot = np.array([[cd, -sd], [sd, cd]])
        return replace(self, cos_coeffs=tuple(c * cm + s * sm),
                       sin_coeffs=tuple(-c * sm + s * cm),
                       matrix=tuple(map(tuple, m_old @ rot)))

    # -- serialization -----------------------------------------------------

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind == "ellipse":
            out["a"] = self.a
            out["b"] = self.b
        else:
            out["r0"] = self.r0
            out["cos"] = list(self.cos_coeffs)
            out["sin"] = list(self.sin_coeffs)
        if self.matrix is not None or self.shift is not None:
            m, v = self.transform_arrays()
            out["transform"] = {"matrix": m.tolist(), "shift": v.tolist()}
        return out

    @classmethod
    def from_dict(cls, data):
        kind = data["kind"]
        if kind == "ellipse":
            spec = cls.ellipse(data["a"], data["b"])
        elif kind == "radial-fourier":
            spec = cls.radial(data["r0"], data.get("cos", ()), data.get("sin", ()))
        else:
            raise ValueError(f"unknown curve kind {kind!r}")
        tr = data.get("transform")
        if tr is not None:
            spec = spec.transformed(tr.get("matrix"), tr.get("shift"))
        return spec


def _radial_values(spec, theta):
    """r and its first four theta-derivatives for a radial-fourier spec."""
    n_modes = max(len(spec.cos_coeffs), len(spec.sin_coeffs))
    r = np.full(theta.shape, spec.r0)
    d = [r, np.zeros_like(theta), np.zeros_like(theta),
         np.zeros_like(theta), np.zeros_like(theta)]
    if n_modes == 0:
        return d
    m = np.arange(1, n_modes + 1)
    c = np.zeros(n_modes)
    s = np.zeros(n_modes)
    c[:len(spec.cos_coeffs)] = spec.cos_coeffs
    s[:len(spec.sin_coeffs)] = spec.sin_coeffs
    mt = np.outer(theta, m)
    cos_mt, sin_mt = np.cos(mt), np.sin(mt)
    r0 = spec.r0
    d[0] = r0 * (1.0 + cos_mt @ c + sin_mt @ s)
    d[1] = r0 * (sin_mt @ (-m * c) + cos_mt @ (m * s))
    d[2] = r0 * (cos_mt @ (-m**2 * c) + sin_mt @ (-m**2 * s))
    d[3] = r0 * (sin_mt @ (m**3 * c) + cos_mt @ (-m**3 * s))
    d[4] = r0 * (cos_mt @ (m**4 * c) + sin_mt @ (m**4 * s))
    return d


def generator_samples(spec, theta):
    """x(theta) and theta-derivatives up to order 4, transform applied.

    Returns a list of five (n, 2) arrays.  Raises ConvexityError if the
    radial profile is not positive.
    """
    theta = np.asarray(theta, dtype=float)
    e = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    ep = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    if spec.kind == "ellipse":
        ax = np.array([spec.a, 0.0])
        ay = np.array([0.0, spec.b])
        base = [np.outer(np.cos(theta), ax) + np.outer(np.sin(theta), ay)]
        for _ in range(4):
            prev = base[-1]
            base.append(np.stack([-prev[:, 1] * spec.a / spec.b,
                                  prev[:, 0] * spec.b / spec.a], axis=-1))
        # d/dt (a cos, b sin) = (-a sin, b cos); closed under the rotation-like map above
    elif spec.kind == "radial-fourier":
        r = _radial_values(spec, theta)
        if np.min(r[0]) <= 0.0:
            bad = theta[r[0] <= 0.0]
            raise ConvexityError("radial profile r(theta) is not positive", bad)
        base = [
            r[0][:, None] * e,
            r[1][:, None] * e + r[0][:, None] * ep,
            (r[2] - r[0])[:, None] * e + (2 * r[1])[:, None] * ep,
            (r[3] - 3 * r[1])[:, None] * e + (3 * r[2] - r[0])[:, None] * ep,
            (r[4] - 6 * r[2] + r[0])[:, None] * e + (4 * r[3] - 4 * r[1])[:, None] * ep,
        ]
    else:
        raise ValueError(f"unknown curve kind {spec.kind!r}")
    m, v = spec.transform_arrays()
    if np.linalg.det(m) <= 0:
        raise ValueError("affine pre-transform must preserve orientation")
    out = [base[j] @ m.T for j in range(5)]
    out[0] = out[0] + v
    return out


def _convexity_dets(spec, n_theta=4096):
    theta = np.arange(n_theta) * (TWO_PI / n_theta)
    x = generator_samples(spec, theta)
    d = cross2(x[1], x[2])
    if np.min(d) <= 0.0:
        raise ConvexityError("boundary has non-positive curvature",
                             theta[d <= 0.0])
    return theta, x, d


def affine_perimeter(spec, n_theta=4096):
    """Total affine arc length, the integral of kappa^(1/3) dt."""
    _, _, d = _convexity_dets(spec, n_theta)
    return TWO_PI * float(np.mean(np.cbrt(d)))


def normalize_unit_perimeter(spec, n_theta=4096):
    """Rescale so the affine perimeter is 1 (dilation factor lambda^(-3/2))."""
    lam = affine_perimeter(spec, n_theta)
    return spec.scaled(lam ** -1.5)


class AffineCurve:
    """Immutable affine-arc-length sampling of a convex boundary.

    All fields are fixed at construction; evaluation anywhere on [0, 1)
    goes through truncated trigonometric interpolants of the analytic
    samples, so it is safe to share between threads.
    """

    def __init__(self, spec, n, s_grid, derivs, k_values, rho13_values,
                 theta_values, perimeter):
        self.spec = spec
        self.n = n
        self.s_grid = s_grid
        self.derivs = derivs            # list of four (n, 2) arrays
        self.k_values = k_values
        self.rho13_values = rho13_values
        self.theta_values = theta_values
        self.perimeter = perimeter
        self._series = [
            (TrigSeries.from_samples(derivs[j][:, 0]),
             TrigSeries.from_samples(derivs[j][:, 1]))
            for j in range(4)
        ]
        self.k_series = TrigSeries.from_samples(k_values)
        self.rho13_series = TrigSeries.from_samples(rho13_values)
        self._theta_series = TrigSeries.from_samples(theta_values - TWO_PI * s_grid)
        psi = np.unwrap(np.arctan2(derivs[1][:, 1], derivs[1][:, 0]))
        self._psi_series = TrigSeries.from_samples(psi - TWO_PI * s_grid)
        self._psi_slope = self._psi_series.derivative()

    # -- evaluation ----------------------------------------------------

    def eval(self, s, order=0):
        """gamma^(order)(s) for order in 0..3; periodic in s."""
        if not 0 <= order <= 3:
            raise ValueError("derivative order must be in 0..3")
        sx, sy = self._series[order]
        x = sx(s)
        y = sy(s)
        return np.stack([x, y], axis=-1) if np.ndim(x) else np.array([x, y])

    def point(self, s):
        return self.eval(s, 0)

    def tangent_norm(self, s):
        """|gamma'(s)| = rho(t(s))^(1/3)."""
        return self.rho13_series(s)

    def affine_curvature(self, s):
        return self.k_series(s)

    def theta(self, s):
        """Generator angle theta(s), increasing by 2*pi per period."""
        return TWO_PI * np.asarray(s, dtype=float) + self._theta_series(s)

    @property
    def enclosed_area(self):
        g, gp = self.derivs[0], self.derivs[1]
        return 0.5 * float(np.mean(cross2(g, gp)))

    # -- geometric queries ----------------------------------------------

    def tangent_angle(self, s):
        return TWO_PI * np.asarray(s, dtype=float) + self._psi_series(s)

    def opposite_point(self, s):
        """Parameter s* with gamma'(s*) antiparallel to gamma'(s).

        Unique by strict convexity: the tangent angle is strictly
        increasing, so s* solves psi(s*) = psi(s) + pi.
        """
        s_arr = np.asarray(s, dtype=float)
        target = self.tangent_angle(s_arr) + np.pi
        u = s_arr + 0.5
        for _ in range(60):
            step = (self.tangent_angle(u) - target) / (TWO_PI + self._psi_slope(u))
            u = u - step
            if np.max(np.abs(step)) < 1e-14:
                break
        else:
            raise RuntimeError("opposite-point iteration did not converge; "
                               "increase the sample count")
        return u % 1.0 if np.ndim(s) else float(u % 1.0)

    def higher_derivs_grid(self, order):
        """gamma^(order) on the sample grid for order 4..6.

        Uses gamma''' = -k gamma' repeatedly, with spectral derivatives
        of the affine curvature table.
        """
        k = self.k_values
        kp = self.k_series.derivative(1)(self.s_grid)
        kpp = self.k_series.derivative(2)(self.s_grid)
        kppp = self.k_series.derivative(3)(self.s_grid)
        g1, g2 = self.derivs[1], self.derivs[2]
        if order == 4:
            return -kp[:, None] * g1 - k[:, None] * g2
        if order == 5:
            return (-kpp + k**2)[:, None] * g1 - (2 * kp)[:, None] * g2
        if order == 6:
            return (-kppp + 4 * k * kp)[:, None] * g1 + (-3 * kpp + k**2)[:, None] * g2
        raise ValueError("order must be 4, 5 or 6")

    def circle_distance(self, r_max=6):
        """Sum over 0..r_max of sup |gamma^(j) - disk^(j)| on the grid.

        The reference disk has affine perimeter 1 and first-order contact
        with the boundary at gamma(0).
        """
        radius = UNIT_CIRCLE_RADIUS
        g1_0 = self.eval(0.0, 1)
        psi0 = np.arctan2(g1_0[1], g1_0[0])
        phi0 = psi0 - 0.5 * np.pi
        center = self.point(0.0) - radius * np.array([np.cos(phi0), np.sin(phi0)])
        phase = TWO_PI * self.s_grid + phi0
        total = 0.0
        for j in range(r_max + 1):
            disk = radius * TWO_PI**j * np.stack(
                [np.cos(phase + j * 0.5 * np.pi), np.sin(phase + j * 0.5 * np.pi)],
                axis=-1)
            if j == 0:
                disk = disk + center
            own = self.derivs[j] if j <= 3 else self.higher_derivs_grid(j)
            total += float(np.max(np.linalg.norm(own - disk, axis=1)))
        return total


def frame_residuals(curve):
    """Max residuals of the affine-frame identities on the sample grid.

    Returns (|det(g', g'') - 1|_max, |g''' + k g'|_max).
    """
    g1, g2, g3 = curve.derivs[1], curve.derivs[2], curve.derivs[3]
    r1 = float(np.max(np.abs(cross2(g1, g2) - 1.0)))
    r2 = float(np.max(np.linalg.norm(g3 + curve.k_values[:, None] * g1, axis=1)))
    return r1, r2


def frame_tolerance(n):
    """Accuracy budget for the frame identities at sample count n."""
    return 100.0 * float(n) ** -3


def build_affine_curve(spec, n=4096):
    """Sample the affine-arc-length parametrization on n uniform points.

    The spec must already have unit affine perimeter (see
    `normalize_unit_perimeter`); theta(s) is obtained by inverting the
    spectrally integrated arc length with Newton's method.
    """
    if n < MIN_SAMPLES:
        raise ValueError(f"sample count must be at least {MIN_SAMPLES}")
    m_theta = max(int(n), 1024)
    u_grid = np.arange(m_theta) / m_theta
    theta_grid = TWO_PI * u_grid
    x = generator_samples(spec, theta_grid)
    d = cross2(x[1], x[2])
    if np.min(d) <= 0.0:
        raise ConvexityError("boundary has non-positive curvature",
                             theta_grid[d <= 0.0])
    sigma = TrigSeries.from_samples(np.cbrt(d))
    perimeter = TWO_PI * sigma.mean
    if abs(perimeter - 1.0) > 1e-8:
        raise ValueError(
            f"affine perimeter is {perimeter!r}, not 1; normalize the spec first")

    s_of_u = lambda u: TWO_PI * sigma.antiderivative(u)
    table_y = s_of_u(u_grid)
    s_grid = np.arange(n) / n
    u_at_s = invert_monotone(s_of_u, lambda u: TWO_PI * sigma(u),
                             s_grid, u_grid, table_y)
    u_at_s[0] = 0.0
    theta_at_s = TWO_PI * u_at_s

    x = generator_samples(spec, theta_at_s)
    d = cross2(x[1], x[2])
    dp = cross2(x[1], x[3])
    dpp = cross2(x[2], x[3]) + cross2(x[1], x[4])
    sg = np.cbrt(d)
    sgp = dp / (3.0 * sg**2)
    sgpp = dpp / (3.0 * sg**2) - (2.0 / 9.0) * dp**2 / sg**5

    g0 = x[0]
    g1 = x[1] / sg[:, None]
    g2 = x[2] / sg[:, None]**2 - x[1] * (sgp / sg**3)[:, None]
    g3 = (x[3] / sg[:, None]**3
          - 3.0 * x[2] * (sgp / sg**4)[:, None]
          + x[1] * ((3.0 * sgp**2 / sg**5) - sgpp / sg**4)[:, None])

    k_values = cross2(g2, g3)
    rho13 = np.linalg.norm(x[1], axis=1) / sg

    return AffineCurve(spec, n, s_grid, [g0, g1, g2, g3], k_values, rho13,
                       theta_at_s, perimeter)
