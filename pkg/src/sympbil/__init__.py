"""Numerical laboratory for symplectic billiards on convex planar domains."""

from .curve import (
    AffineCurve,
    ConvexityError,
    CurveSpec,
    UNIT_CIRCLE_CURVATURE,
    UNIT_CIRCLE_RADIUS,
    affine_perimeter,
    build_affine_curve,
    normalize_unit_perimeter,
)
from .billiard import (
    BilliardDomainError,
    PhasePoint,
    generating_action,
    reflection_residual,
    step,
    step_back,
)
from .orbits import (
    OrbitError,
    PeriodicOrbit,
    RadonError,
    four_orbit_map,
    integrability_probe,
    maximize_axial,
    maximize_central,
    maximize_free,
    radon_anchor,
)
from .spectrum import (
    BetaFit,
    area_spectrum_sample,
    delta_q,
    fit_beta_coeffs,
    mather_beta,
)
from .expansion import (
    ExpansionReport,
    alpha_beta_functions,
    predict_chord,
    predict_parameter,
    predict_spacing,
    residual_order,
)
from .deformation import (
    DomainFamily,
    FourierSeries,
    circle_mode_identity,
    deformation_function,
    fourier_coeffs,
    isospectral_residual,
    normalize_axial_family,
    normalize_radon_family,
    rigidity_row,
    spectral_sum,
    weight_u,
)

__all__ = [
    "AffineCurve",
    "BetaFit",
    "BilliardDomainError",
    "ConvexityError",
    "CurveSpec",
    "DomainFamily",
    "ExpansionReport",
    "FourierSeries",
    "OrbitError",
    "PeriodicOrbit",
    "PhasePoint",
    "RadonError",
    "UNIT_CIRCLE_CURVATURE",
    "UNIT_CIRCLE_RADIUS",
    "affine_perimeter",
    "alpha_beta_functions",
    "area_spectrum_sample",
    "build_affine_curve",
    "circle_mode_identity",
    "deformation_function",
    "delta_q",
    "fit_beta_coeffs",
    "four_orbit_map",
    "fourier_coeffs",
    "generating_action",
    "integrability_probe",
    "isospectral_residual",
    "mather_beta",
    "maximize_axial",
    "maximize_central",
    "maximize_free",
    "normalize_axial_family",
    "normalize_radon_family",
    "normalize_unit_perimeter",
    "predict_chord",
    "predict_parameter",
    "predict_spacing",
    "radon_anchor",
    "reflection_residual",
    "residual_order",
    "rigidity_row",
    "spectral_sum",
    "step",
    "step_back",
    "weight_u",
]
