"""Asymptotic predictions for orbit spacings, parameters and chords.

For a maximizing 1/q orbit with s_0 = 0 and s_q = 1 the affine
parameters obey

    lambda_j = 1/q - I/(30 q^3) + k(j/q)/(30 q^3) - k'(j/q)/(60 q^4) + O(q^-5)
    s_j      = j/q + (1/(30 q^2)) int_0^{j/q} k - j I/(30 q^3) + O(q^-4)

with I the mean affine curvature, and the double chord through vertex j is

    |gamma(s_{j+1}) - gamma(s_{j-1})| =
        rho(t(s_j))^(1/3) [ 2/q + (k(j/q) - I)/(15 q^3) - k(s_j)/(3 q^3) + O(q^-5) ].

Regrouping the bracket around the unit-perimeter-circle curvature (2 pi)^2
gives the equivalent form 2/q - (2 pi)^2/(3 q^3) + beta(j/q)/q^3 with

    beta(x) = (k(x) - I)/15 + ((2 pi)^2 - k(x))/3,

at the cost of replacing k(s_j) by k(j/q) (an O(delta/q^5) change inside
the bracket on nearly circular domains).
"""

from dataclasses import dataclass

import numpy as np

from .curve import UNIT_CIRCLE_CURVATURE
from .orbits import maximize_axial

#: residuals below this are solver noise, not expansion error
NOISE_FLOOR = 1e-10


@dataclass
class ExpansionReport:
    which: str
    q_values: tuple
    max_residuals: tuple
    slope: float                # nan when too few usable points
    slope_halfwidth: float
    used: tuple                 # per-q flags; False = at the noise floor
    floor_limited: bool


def predict_spacing(curve, q, j):
    """Predicted lambda_j = s_j - s_{j-1}; exact through order q^-4."""
    j = np.asarray(j, dtype=float)
    x = j / q
    kser = curve.k_series
    kbar = kser.mean
    return (1.0 / q - kbar / (30.0 * q**3) + kser(x) / (30.0 * q**3)
            - kser.derivative(1)(x) / (60.0 * q**4))


def predict_parameter(curve, q, j, s0=0.0):
    """Predicted vertex parameter s_j for the orbit started at s0."""
    j = np.asarray(j, dtype=float)
    x = j / q
    kser = curve.k_series
    integral = kser.antiderivative(s0 + x) - kser.antiderivative(s0)
    return s0 + x + integral / (30.0 * q**2) - j * kser.mean / (30.0 * q**3)


def beta_bracket_function(curve, x):
    """beta(x) = (k(x) - I)/15 + ((2 pi)^2 - k(x))/3."""
    kser = curve.k_series
    kx = kser(x)
    return (kx - kser.mean) / 15.0 + (UNIT_CIRCLE_CURVATURE - kx) / 3.0


def alpha_shift_function(curve, x, s0=0.0):
    """alpha(x) = (1/30) int_{s0}^{s0+x} k - (x/30) int_0^1 k; odd for s0 = 0."""
    kser = curve.k_series
    x = np.asarray(x, dtype=float)
    integral = kser.antiderivative(s0 + x) - kser.antiderivative(s0)
    return integral / 30.0 - x * kser.mean / 30.0


def alpha_beta_functions(curve):
    """Tables of alpha and beta on the curve's sample grid."""
    s = curve.s_grid
    return alpha_shift_function(curve, s), beta_bracket_function(curve, s)


def predict_chord(curve, q, j, variant="curvature"):
    """Predicted double chord at vertex j.

    variant="curvature" evaluates the affine curvature at the predicted
    s_j inside the bracket; variant="regrouped" collects the bracket
    around the conic curvature, with k at j/q.  The two differ by O(delta/q^5) on nearly circular
    domains.
    """
    j = np.asarray(j, dtype=float)
    x = j / q
    s_j = predict_parameter(curve, q, j)
    rho13 = curve.rho13_series(s_j)
    kser = curve.k_series
    if variant == "curvature":
        bracket = (2.0 / q
                   + (kser(x) - kser.mean) / (15.0 * q**3)
                   - kser(s_j) / (3.0 * q**3))
    elif variant == "regrouped":
        bracket = (2.0 / q - UNIT_CIRCLE_CURVATURE / (3.0 * q**3)
                   + beta_bracket_function(curve, x) / q**3)
    else:
        raise ValueError(f"unknown chord variant {variant!r}")
    return rho13 * bracket


def measured_orbit_data(curve, q):
    """(s_0..s_q, lambda_1..lambda_q, chords) from the axial maximizer."""
    orbit = maximize_axial(curve, q)
    s = np.append(orbit.params, 1.0)
    lam = np.diff(s)
    pts = curve.eval(orbit.params, 0)
    chords = np.linalg.norm(np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0),
                            axis=1)
    return s, lam, chords


def _slope_fit(qs, residuals):
    logq = np.log(np.asarray(qs, dtype=float))
    logr = np.log(np.asarray(residuals, dtype=float))
    coef, cov = np.polyfit(logq, logr, 1, cov=True)
    half = 2.0 * float(np.sqrt(cov[0, 0]))
    return float(coef[0]), half


def residual_order(curve, which, q_set):
    """Per-q max residual of a prediction and its log-log decay slope.

    `which` is one of "lambda", "s", "chord".  Periods whose residual
    sits below NOISE_FLOOR are excluded from the slope fit and flagged.
    """
    if which not in ("lambda", "s", "chord"):
        raise ValueError("which must be 'lambda', 's' or 'chord'")
    q_list = [int(q) for q in q_set]
    residuals = []
    for q in q_list:
        s, lam, chords = measured_orbit_data(curve, q)
        j_mid = np.arange(1, q + 1)
        if which == "lambda":
            res = np.abs(lam - predict_spacing(curve, q, j_mid))
        elif which == "s":
            res = np.abs(s[1:-1] - predict_parameter(curve, q, np.arange(1, q)))
        else:
            res = np.abs(chords - predict_chord(curve, q, np.arange(q)))
        residuals.append(float(np.max(res)))
    used = [r > NOISE_FLOOR for r in residuals]
    floor_limited = not all(used)
    qs_fit = [q for q, u in zip(q_list, used) if u]
    rs_fit = [r for r, u in zip(residuals, used) if u]
    if len(qs_fit) >= 2:
        slope, half = _slope_fit(qs_fit, rs_fit)
    else:
        slope, half = float("nan"), float("nan")
        floor_limited = True
    return ExpansionReport(which=which, q_values=tuple(q_list),
                           max_residuals=tuple(residuals), slope=slope,
                           slope_halfwidth=half, used=tuple(used),
                           floor_limited=floor_limited)


def circle_chord_report(curve, q_set):
    """Prediction error against the exact circle chord 2 R sin(2 pi / q)."""
    radius = np.linalg.norm(curve.point(0.0))
    q_list = [int(q) for q in q_set]
    errors = []
    for q in q_list:
        exact = 2.0 * radius * np.sin(2.0 * np.pi / q)
        pred = float(predict_chord(curve, q, 0))
        errors.append(abs(pred - exact))
    slope, half = _slope_fit(q_list, errors)
    return ExpansionReport(which="chord-circle", q_values=tuple(q_list),
                           max_residuals=tuple(errors), slope=slope,
                           slope_halfwidth=half,
                           used=tuple(True for _ in q_list),
                           floor_limited=False)
