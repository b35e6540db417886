"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
PASS/FAIL lines at their stated tolerances.
"""

import time

import numpy as np

from sympbil import CurveSpec, UNIT_CIRCLE_RADIUS, build_affine_curve, \
    normalize_unit_perimeter
from sympbil.deformation import (
    DomainFamily,
    circle_mode_identity,
    deformation_function,
    fourier_coeffs,
    isospectral_residual,
    spectral_sum,
    weight_u_grid,
)
from sympbil.expansion import circle_chord_report, residual_order
from sympbil.orbits import (
    four_orbit_map,
    integrability_probe,
    maximize_axial,
    maximize_free,
)
from sympbil.spectrum import delta_q, fit_beta_coeffs

R = UNIT_CIRCLE_RADIUS
TWO_PI = 2.0 * np.pi


def _verdict(number, ok, description, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} {status}: {description} ({detail})")
    assert ok, f"criterion {number} failed: {detail}"


def test_criterion_1_circle_polygon_oracle(circle_curve):
    """Delta_q matches q R^2 sin(2 pi / q) to 1e-9 relative, q in [3, 64]."""
    start = time.perf_counter()
    worst = 0.0
    for q in range(3, 65):
        exact = q * R * R * np.sin(TWO_PI / q)
        rel = abs(maximize_axial(circle_curve, q).action - exact) / exact
        worst = max(worst, rel)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed <= 60.0
    _verdict(1, ok, "circle polygon oracle q in [3,64]",
             f"max rel err {worst:.2e}, runtime {elapsed:.1f}s")


def test_criterion_2_beta_recovery(circle_curve):
    """Fit on q in [10, 60] recovers beta1, beta3, beta5."""
    fit = fit_beta_coeffs(circle_curve, 10, 60)
    e1 = abs(fit.beta1 + 1.0 / (4.0 * np.pi**2)) * 4.0 * np.pi**2
    e3 = abs(fit.beta3 - 1.0 / 6.0) * 6.0
    e5 = abs(fit.beta5 + TWO_PI**2 / 120.0) / (TWO_PI**2 / 120.0)
    ok = e1 <= 1e-6 and e3 <= 1e-5 and e5 <= 1e-3
    _verdict(2, ok, "beta coefficient recovery",
             f"rel errs beta1 {e1:.2e}, beta3 {e3:.2e}, beta5 {e5:.2e}")


def test_criterion_3_equi_affine_invariance(ellipse_spec):
    """Three unimodular images of the ellipse reproduce the circle Delta_q."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(3):
        a, b, c = rng.uniform(-0.4, 0.4, 3)
        m = [[1.0 + a, b], [c, (1.0 + b * c) / (1.0 + a)]]
        curve = build_affine_curve(ellipse_spec.transformed(m), 2048)
        for q in range(3, 13):
            exact = q * R * R * np.sin(TWO_PI / q)
            worst = max(worst, abs(delta_q(curve, q, "free") - exact))
    ok = worst <= 1e-8
    _verdict(3, ok, "equi-affine invariance of Delta_q",
             f"max |Delta_q - circle| {worst:.2e}")


def test_criterion_4_expansion_orders(axial_curve):
    """lambda_j residual slope in [-5.5, -4.5]; s_j slope in [-4.5, -3.5]."""
    qs = [8, 16, 32, 64]
    lam = residual_order(axial_curve, "lambda", qs)
    par = residual_order(axial_curve, "s", qs)
    ok = (-5.5 <= lam.slope <= -4.5) and (-4.5 <= par.slope <= -3.5) \
        and not lam.floor_limited and not par.floor_limited
    _verdict(4, ok, "expansion residual orders on an axial perturbation",
             f"lambda slope {lam.slope:.2f}, s slope {par.slope:.2f}")


def test_criterion_5_chord_decay(circle_curve):
    """Chord prediction error on the circle decays with slope <= -4.5."""
    report = circle_chord_report(circle_curve, range(8, 65, 8))
    ok = report.slope <= -4.5
    _verdict(5, ok, "chord expansion against exact circle chords",
             f"slope {report.slope:.2f}")


def test_criterion_6_envelope_identity():
    """Finite-difference d_tau Delta_q equals the weighted chord sum."""
    h = 1e-4
    generic = DomainFamily(base=CurveSpec.radial(1.0, cos=(0.0, 1e-2)),
                           vel_cos=(0.0, 1e-2, 3e-3), symmetry="axial",
                           normalization="axial", n_samples=2048)
    worst = max(isospectral_residual(generic, q, h_tau=h)
                for q in range(4, 17))
    shear = DomainFamily(base=normalize_unit_perimeter(CurveSpec.ellipse(2, 1)),
                         affine_generator=((0.0, 1.0), (0.0, 0.0)),
                         symmetry="free", normalization="unit",
                         n_samples=2048)
    worst_affine = 0.0
    for q in range(4, 17):
        d_plus = maximize_free(shear.curve_at(h), q).action
        d_minus = maximize_free(shear.curve_at(-h), q).action
        fd = (d_plus - d_minus) / (2.0 * h)
        curve = shear.curve_at(0.0)
        orbit = maximize_free(curve, q)
        ss = spectral_sum(curve, orbit.params,
                          deformation_function(shear, 0.0, orbit.params))
        worst_affine = max(worst_affine, abs(fd), abs(ss))
    ok = worst <= 1e-6 + 10.0 * h * h and worst_affine <= 1e-8
    _verdict(6, ok, "envelope identity for axial and shear families",
             f"generic residual {worst:.2e}, affine terms {worst_affine:.2e}")


def test_criterion_7_radon_integrability(ellipse_curve, central_curve):
    """phi = s + 1/4 on the ellipse; probes flat there, 10x larger perturbed."""
    grid = np.arange(64) / 64.0
    phi_defect = max(abs((four_orbit_map(ellipse_curve, float(s)) - s - 0.25
                          + 0.5) % 1.0 - 0.5) for s in grid)
    probes = {q: integrability_probe(ellipse_curve, q) for q in (4, 6, 8)}
    perturbed = integrability_probe(central_curve, 6)
    ratio = perturbed / max(probes[6], 1e-300)
    ok = phi_defect <= 1e-8 and all(p <= 1e-8 for p in probes.values()) \
        and ratio >= 10.0
    _verdict(7, ok, "Radon map and integrability probes",
             f"phi defect {phi_defect:.2e}, ellipse probes "
             f"{max(probes.values()):.2e}, perturbed/ellipse {ratio:.1e}")


def test_criterion_8_circle_mode_identity():
    """Band-limited resonance identity to 1e-10 for q in [3, 16]."""
    rng = np.random.default_rng(7)
    grid = np.arange(512) / 512.0
    u = np.zeros_like(grid)
    for k in range(1, 33):
        a, b = rng.normal(size=2) / k
        u += a * np.cos(TWO_PI * k * grid) + b * np.sin(TWO_PI * k * grid)
    worst = max(abs(np.subtract(*circle_mode_identity(u, q)))
                for q in range(3, 17))
    ok = worst <= 1e-10
    _verdict(8, ok, "circle mode identity for K = 32 band-limited weights",
             f"max gap {worst:.2e}")


def test_criterion_9_fourier_symmetry_suite():
    """Axial weights are even/real; central weights are half-periodic."""
    axial = DomainFamily(base=CurveSpec.radial(1.0, cos=(0.0, 1e-2)),
                         vel_cos=(0.0, 1e-2, 3e-3), symmetry="axial",
                         normalization="axial", n_samples=2048)
    u_ax = weight_u_grid(axial)
    series_ax = fourier_coeffs(u_ax, 64)
    im_max = float(np.max(np.abs(series_ax.coeffs.imag)))
    ends = max(abs(u_ax[0]), abs(u_ax[u_ax.size // 2]))
    central = DomainFamily(base=CurveSpec.radial(1.0, cos=(0.0, 0.0, 0.0, 5e-3)),
                           vel_cos=(0.0, 4e-3, 0.0, 2e-3), symmetry="central",
                           normalization="unit", n_samples=2048)
    series_c = fourier_coeffs(weight_u_grid(central), 64)
    ks = np.arange(-64, 65)
    odd_max = float(np.max(np.abs(series_c.coeffs[ks % 2 != 0])))
    ok = im_max <= 1e-9 and ends <= 1e-9 and odd_max <= 1e-10
    _verdict(9, ok, "Fourier symmetry of normalized family weights",
             f"axial Im {im_max:.2e}, u(0),u(1/2) {ends:.2e}, "
             f"central odd modes {odd_max:.2e}")
