"""Deformation families, normalizations and the rigidity identities.

A `DomainFamily` is a C^1 path tau -> boundary built from a base spec by
moving radial Fourier coefficients at constant velocity and/or composing
with a unimodular affine path exp(tau G).  Families are re-normalized at
every tau (unit perimeter, and optionally the axial or Radon pinning),
so the normalized family is the object measured.

The infinitesimal deformation function is n(tau, s) = det(d_tau gamma, T)
with T the unit tangent; the weight u = n rho^(1/3) equals
det(d_tau gamma, gamma') in the affine parametrization.  At a maximizing
orbit, d_tau of the maximal action equals the chord-weighted sum of n
(the envelope identity), and expanding the weighted sum of u over the
orbit in Fourier modes produces, for each q, one row of the rigidity
system: a resonant term on modes divisible by q plus 1/q^2 couplings
through the Fourier coefficients of the spacing functions alpha and
beta.  `rigidity_row` evaluates both sides of that row.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from ._fourier import TrigSeries
from .curve import (UNIT_CIRCLE_CURVATURE, UNIT_CIRCLE_RADIUS, CurveSpec,
                    build_affine_curve, cross2, normalize_unit_perimeter)
from .expansion import alpha_shift_function, beta_bracket_function
from .orbits import maximize_axial, maximize_central, maximize_free, radon_anchor

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# normal positions for symmetric families


def _axis_endpoints(spec):
    """Images of the generator's symmetry-axis intersections (theta = 0, pi)."""
    if spec.kind == "radial-fourier" and any(c != 0.0 for c in spec.sin_coeffs):
        raise ValueError("axis detection requires a cosine-only radial spec "
                         "(axis through theta = 0)")
    from .curve import generator_samples
    pts = generator_samples(spec, np.array([0.0, np.pi]))[0]
    return pts[0], pts[1]


def normalize_axial_spec(spec):
    """Translate/rotate/diagonal-scale to the axial normal position.

    Marked point (the theta = 0 axis intersection) at the origin, axis of
    symmetry along x > 0, auxiliary point at (2 (2 pi)^{-3/2}, 0).  All
    maps are unimodular, so the area spectrum is unchanged.
    """
    spec = normalize_unit_perimeter(spec)
    marked, aux = _axis_endpoints(spec)
    axis = aux - marked
    d = float(np.hypot(*axis))
    if d <= 0.0:
        raise ValueError("auxiliary abscissa is not positive")
    ca, sa = axis[0] / d, axis[1] / d
    rot = np.array([[ca, sa], [-sa, ca]])       # axis -> +x
    mu = 2.0 * UNIT_CIRCLE_RADIUS / d
    diag = np.array([[mu, 0.0], [0.0, 1.0 / mu]])
    m = diag @ rot
    return spec.transformed(m, -m @ marked)


def normalize_radon_spec(spec, n_samples=2048):
    """Center/rotate/shear/diagonal-scale to the Radon normal position.

    The anchored 4-orbit vertex gamma(s_bar) is re-seated at s = 0 and
    pinned to ((2 pi)^{-3/2}, 0); gamma(1/4) is placed on the y > 0 axis
    and its height (the y-landing) is reported, not pinned: for an
    area-isospectral family it must come out tau-independent.

    Returns (normalized spec, y_landing).
    """
    spec = normalize_unit_perimeter(spec)
    if spec.kind == "radial-fourier":
        modes = np.arange(1, max(len(spec.cos_coeffs), len(spec.sin_coeffs)) + 1)
        c = np.zeros(modes.size)
        s = np.zeros(modes.size)
        c[:len(spec.cos_coeffs)] = spec.cos_coeffs
        s[:len(spec.sin_coeffs)] = spec.sin_coeffs
        odd = (modes % 2 == 1)
        if np.any(c[odd] != 0.0) or np.any(s[odd] != 0.0):
            raise ValueError("central symmetry requires even radial modes only")
    _, center = spec.transform_arrays()
    spec = spec.transformed(shift=-center)
    curve = build_affine_curve(spec, n_samples)
    s_bar = radon_anchor(curve)
    if s_bar != 0.0:
        spec = spec.shift_origin(float(curve.theta(s_bar)))
        curve = build_affine_curve(spec, n_samples)
    anchor = curve.point(0.0)
    d = float(np.hypot(*anchor))
    ca, sa = anchor[0] / d, anchor[1] / d
    rot = np.array([[ca, sa], [-sa, ca]])
    quarter = rot @ curve.point(0.25)
    if quarter[1] <= 0.0:
        raise ValueError("gamma(1/4) did not land on y > 0; orientation broken")
    shear = np.array([[1.0, -quarter[0] / quarter[1]], [0.0, 1.0]])
    mu = UNIT_CIRCLE_RADIUS / d
    diag = np.array([[mu, 0.0], [0.0, 1.0 / mu]])
    y_landing = quarter[1] / mu
    return spec.transformed(diag @ shear @ rot), float(y_landing)


# ---------------------------------------------------------------------------
# families


def _expm_traceless(g, tau):
    """exp(tau G) for traceless G (closed form; det = 1 exactly)."""
    g = np.asarray(g, dtype=float)
    disc = -float(np.linalg.det(g))     # G^2 = disc * I
    if disc > 0:
        w = np.sqrt(disc)
        return np.cosh(tau * w) * np.eye(2) + np.sinh(tau * w) / w * g
    if disc < 0:
        w = np.sqrt(-disc)
        return np.cos(tau * w) * np.eye(2) + np.sin(tau * w) / w * g
    return np.eye(2) + tau * g


@dataclass(frozen=True)
class DomainFamily:
    """A C^1 path of convex domains with a fixed symmetry class.

    Radial mode velocities deform the generator coefficients linearly in
    tau; an optional traceless generator G adds the unimodular affine
    path exp(tau G) plus a translation at constant velocity.  The
    `normalization` mode is re-applied at every tau.
    """

    base: CurveSpec
    vel_cos: tuple = ()
    vel_sin: tuple = ()
    affine_generator: tuple = None
    translation_velocity: tuple = (0.0, 0.0)
    symmetry: str = "axial"              # axial | central | free
    normalization: str = "unit"          # none | unit | axial | radon
    tau_range: tuple = (-1.0, 1.0)
    n_samples: int = 4096
    fd_step: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "_curve_cache", {})
        object.__setattr__(self, "_y_cache", {})

    @property
    def is_affine(self):
        """True when the path is purely affine (analytic tau-derivative)."""
        radial = any(v != 0.0 for v in self.vel_cos + self.vel_sin)
        return (not radial) and self.normalization in ("none", "unit")

    def raw_spec_at(self, tau):
        tau = float(tau)
        if not self.tau_range[0] <= tau <= self.tau_range[1]:
            raise ValueError(f"tau {tau} outside the family range")
        spec = self.base
        if any(v != 0.0 for v in self.vel_cos + self.vel_sin):
            if spec.kind != "radial-fourier":
                raise ValueError("mode velocities need a radial-fourier base")
            n = max(len(spec.cos_coeffs), len(self.vel_cos),
                    len(spec.sin_coeffs), len(self.vel_sin))
            c = np.zeros(n)
            s = np.zeros(n)
            c[:len(spec.cos_coeffs)] = spec.cos_coeffs
            s[:len(spec.sin_coeffs)] = spec.sin_coeffs
            c[:len(self.vel_cos)] += tau * np.asarray(self.vel_cos)
            s[:len(self.vel_sin)] += tau * np.asarray(self.vel_sin)
            spec = replace(spec, cos_coeffs=tuple(c), sin_coeffs=tuple(s))
        if self.affine_generator is not None:
            m = _expm_traceless(self.affine_generator, tau)
            spec = spec.transformed(m, tau * np.asarray(self.translation_velocity))
        elif any(v != 0.0 for v in self.translation_velocity):
            spec = spec.transformed(shift=tau * np.asarray(self.translation_velocity))
        return spec

    def spec_at(self, tau):
        spec = self.raw_spec_at(tau)
        if self.normalization == "none":
            return spec
        if self.normalization == "unit":
            return normalize_unit_perimeter(spec)
        if self.normalization == "axial":
            return normalize_axial_spec(spec)
        if self.normalization == "radon":
            spec, y = normalize_radon_spec(spec)
            self._y_cache[float(tau)] = y
            return spec
        raise ValueError(f"unknown normalization {self.normalization!r}")

    def curve_at(self, tau):
        key = float(tau)
        if key not in self._curve_cache:
            self._curve_cache[key] = build_affine_curve(self.spec_at(key),
                                                        self.n_samples)
        return self._curve_cache[key]

    def y_landing(self, tau):
        """Height of gamma(1/4) in the Radon normalization at this tau."""
        if self.normalization != "radon":
            raise ValueError("y-landing is defined for radon normalization")
        key = float(tau)
        if key not in self._y_cache:
            self.curve_at(key)
        return self._y_cache[key]

    def velocity(self, tau, s):
        """d_tau gamma(tau, s) at fixed affine parameter s.

        Analytic for purely affine families; otherwise central
        differences with one Richardson refinement (O(h^4)).
        """
        s = np.asarray(s, dtype=float)
        if self.is_affine:
            g = np.asarray(self.affine_generator, dtype=float) \
                if self.affine_generator is not None else np.zeros((2, 2))
            w = np.asarray(self.translation_velocity, dtype=float)
            pts = self.curve_at(tau).eval(s, 0)
            return (pts - tau * w) @ g.T + w
        h = self.fd_step
        big = (self.curve_at(tau + h).eval(s, 0)
               - self.curve_at(tau - h).eval(s, 0)) / (2.0 * h)
        small = (self.curve_at(tau + 0.5 * h).eval(s, 0)
                 - self.curve_at(tau - 0.5 * h).eval(s, 0)) / h
        return (4.0 * small - big) / 3.0

    def to_dict(self):
        out = {"base": self.base.to_dict(),
               "mode_velocities": {"cos": list(self.vel_cos),
                                   "sin": list(self.vel_sin)},
               "symmetry": self.symmetry,
               "tau_range": list(self.tau_range),
               "normalization": self.normalization}
        return out

    @classmethod
    def from_dict(cls, data):
        vel = data.get("mode_velocities", {})
        symmetry = data.get("symmetry", "axial")
        default_norm = "axial" if symmetry == "axial" else "unit"
        return cls(base=CurveSpec.from_dict(data["base"]),
                   vel_cos=tuple(vel.get("cos", ())),
                   vel_sin=tuple(vel.get("sin", ())),
                   symmetry=symmetry,
                   normalization=data.get("normalization", default_norm),
                   tau_range=tuple(data.get("tau_range", (-1.0, 1.0))))


def normalize_axial_family(family):
    """Re-normalize every member to the axial normal position."""
    if family.symmetry != "axial":
        raise ValueError("family is not axially symmetric")
    if any(v != 0.0 for v in family.vel_sin):
        raise ValueError("sine mode velocities break the axial symmetry")
    return replace(family, normalization="axial")


def normalize_radon_family(family):
    """Re-normalize every member to the Radon normal position."""
    if family.symmetry != "central":
        raise ValueError("family is not centrally symmetric")
    return replace(family, normalization="radon")


# ---------------------------------------------------------------------------
# deformation function and Fourier analysis


def deformation_function(family, tau, s):
    """n(tau, s) = det(d_tau gamma, unit tangent)."""
    curve = family.curve_at(tau)
    v = family.velocity(tau, s)
    g1 = curve.eval(s, 1)
    norm = np.linalg.norm(g1, axis=-1)
    return cross2(v, g1) / norm


def weight_u(family, tau, s):
    """u = n rho^(1/3) = det(d_tau gamma, gamma')."""
    curve = family.curve_at(tau)
    return cross2(family.velocity(tau, s), curve.eval(s, 1))


def weight_u_grid(family, tau=0.0):
    """u sampled on the curve's uniform grid."""
    curve = family.curve_at(tau)
    return weight_u(family, tau, curve.s_grid)


@dataclass
class FourierSeries:
    """Two-sided Fourier coefficients u_hat_k, |k| <= K, of a period-1 table."""

    coeffs: np.ndarray
    truncation: int
    real_symmetric: bool
    half_periodic: bool

    def coeff(self, k):
        if abs(k) > self.truncation:
            return 0.0 + 0.0j
        return self.coeffs[k + self.truncation]

    def magnitudes(self):
        return np.abs(self.coeffs)


def fourier_coeffs(samples, K):
    """Discrete Fourier coefficients u_hat_k = (1/N) sum u_j e^{-2 pi i k j / N}.

    Requires N >= 4K; warns when the tail coefficient is not negligible
    (aliasing).  Symmetry metadata: real coefficients mark an even
    function (axial class), vanishing odd coefficients mark a
    half-period function (central class).
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 4 * K:
        raise ValueError("need at least 4K samples for coefficients up to K")
    c = np.fft.fft(samples) / n
    ks = np.arange(-K, K + 1)
    coeffs = c[ks % n]
    if np.max(np.abs(coeffs[[0, -1]])) > 1e-10:
        warnings.warn("Fourier tail |u_hat_K| above 1e-10; possible aliasing",
                      RuntimeWarning, stacklevel=2)
    real_sym = float(np.max(np.abs(coeffs.imag))) <= 1e-9
    odd = coeffs[(ks % 2) != 0]
    half_per = float(np.max(np.abs(odd))) <= 1e-10 if odd.size else True
    return FourierSeries(coeffs=coeffs, truncation=K,
                         real_symmetric=real_sym, half_periodic=half_per)


def spectral_sum(curve, orbit_params, n_values):
    """sum_j |gamma(s_{j+1}) - gamma(s_{j-1})| n(s_j) over the orbit."""
    pts = curve.eval(np.asarray(orbit_params, dtype=float), 0)
    chords = np.linalg.norm(np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0),
                            axis=1)
    return float(np.dot(chords, np.asarray(n_values, dtype=float)))


def _family_maximizer(family, curve, q, s0=None):
    if family.symmetry == "axial":
        return maximize_axial(curve, q)
    if family.symmetry == "central" and s0 is None:
        return maximize_central(curve, q)
    return maximize_free(curve, q, fixed_start=s0)


def isospectral_residual(family, q, tau=0.0, h_tau=1e-4):
    """Defect of the envelope identity d_tau Delta_q = spectral sum.

    The tau-derivative of the maximal action is taken by central
    differences over the normalized family; the identity holds for any
    family, and both terms vanish for an area-isospectral one.
    """
    d_plus = _family_maximizer(family, family.curve_at(tau + h_tau), q).action
    d_minus = _family_maximizer(family, family.curve_at(tau - h_tau), q).action
    fd = (d_plus - d_minus) / (2.0 * h_tau)
    curve = family.curve_at(tau)
    orbit = _family_maximizer(family, curve, q)
    n_vals = deformation_function(family, tau, orbit.params)
    return abs(fd - spectral_sum(curve, orbit.params, n_vals))


def circle_mode_identity(u_samples, q):
    """Both sides of the resonance identity on the circle.

    For band-limited u, sum_j u(j/q) over one period equals
    2 q sum_{k>=1} Re u_hat_{qk}; returns the pair (direct, resonant).
    """
    u_samples = np.asarray(u_samples, dtype=float)
    n = u_samples.size
    series = TrigSeries.from_samples(u_samples)
    if series.bandwidth >= n // 4:
        raise ValueError("u is not band-limited (K >= N/4); refine the grid")
    direct = float(np.sum(series(np.arange(q) / q)))
    c = np.fft.fft(u_samples) / n
    resonant = 0.0
    for k in range(1, n // 2 // q + 1):
        resonant += c[q * k].real
    resonant *= 2.0 * q
    return direct, resonant


@dataclass
class RigidityRow:
    q: int
    fourier_side: float
    direct_side: float

    @property
    def gap(self):
        return abs(self.fourier_side - self.direct_side)


def _coeff_lookup(fft_coeffs):
    n = fft_coeffs.size

    def coef(p):
        if abs(p) > n // 2 - 1:
            return 0.0 + 0.0j
        return fft_coeffs[p % n]

    return coef


def rigidity_row(family, q, s0=0.0, K=None, u_samples=None):
    """Evaluate one row of the rigidity linear system at tau = 0.

    fourier_side assembles the row from the Fourier coefficients of
    u = n rho^(1/3) together with those of the spacing functions alpha
    and beta: resonant modes (q | m) carry q (1 - 2 pi^2 / (3 q^2)) and
    every mode couples at order 1/q^2 through beta_{sq-m} and
    2 pi i m alpha_{sq-m} side bands.  direct_side evaluates
    (q/2) sum_j u(s_j) [2/q - (2 pi)^2/(3 q^3) + beta(s0 + j/q)/q^3]
    on the actual maximizing orbit.  The two agree up to the O(delta/q^5)
    expansion remainders and the truncation at K (required >= 4q).

    `u_samples` overrides the family-derived weight (grid samples), which
    makes the row an identity check for arbitrary synthetic weights.
    """
    curve = family.curve_at(0.0)
    n = curve.n
    if K is None:
        K = max(4 * q, 64)
    if K < 4 * q:
        raise ValueError("truncation K must be at least 4q")
    if K > n // 2 - 1:
        raise ValueError("truncation K exceeds the grid bandwidth")
    if family.symmetry == "axial" and s0 != 0.0:
        raise ValueError("axial rows are anchored at the marked point s0 = 0")

    if u_samples is None:
        u_samples = weight_u_grid(family, 0.0)
    u_samples = np.asarray(u_samples, dtype=float)
    u_hat = _coeff_lookup(np.fft.fft(u_samples) / u_samples.size)

    grid = curve.s_grid
    beta_half = 0.5 * beta_bracket_function(curve, grid)
    alpha_tab = alpha_shift_function(curve, grid, s0=s0)
    b_fft = np.fft.fft(beta_half) / n
    a_fft = np.fft.fft(alpha_tab) / n
    b_band = TrigSeries.from_samples(beta_half).bandwidth
    a_band = TrigSeries.from_samples(alpha_tab).bandwidth
    p_max = max(b_band, a_band, 1)
    b = _coeff_lookup(b_fft)
    a = _coeff_lookup(a_fft)

    resonant_factor = q * (1.0 - 2.0 * np.pi**2 / (3.0 * q**2))
    total = 0.0 + 0.0j
    for m in range(-K, K + 1):
        um = u_hat(m)
        if um == 0.0:
            continue
        row = resonant_factor if m % q == 0 else 0.0
        side = 0.0 + 0.0j
        s_lo = int(np.ceil((m - p_max) / q))
        s_hi = int(np.floor((m + p_max) / q))
        for sdx in range(s_lo, s_hi + 1):
            p = sdx * q - m
            side += (b(p) * np.exp(TWO_PI * 1j * p * s0)
                     + TWO_PI * 1j * m * a(p))
        total += um * np.exp(TWO_PI * 1j * m * s0) * (row + side / q)
    fourier_side = float(total.real)

    orbit = _family_maximizer(family, curve, q,
                              s0=None if family.symmetry == "axial" else s0)
    u_series = TrigSeries.from_samples(u_samples)
    j = np.arange(q)
    bracket = (2.0 / q - UNIT_CIRCLE_CURVATURE / (3.0 * q**3)
               + beta_bracket_function(curve, s0 + j / q) / q**3)
    direct = 0.5 * q * float(np.dot(u_series(orbit.params), bracket))
    return RigidityRow(q=q, fourier_side=fourier_side, direct_side=direct)
