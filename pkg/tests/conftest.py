"""Shared fixtures: standard curves reused across the suite."""

import numpy as np
import pytest

from sympbil import CurveSpec, build_affine_curve, normalize_unit_perimeter

RADIUS = (2.0 * np.pi) ** -1.5


@pytest.fixture(scope="session")
def circle_curve():
    return build_affine_curve(CurveSpec.unit_circle(), 2048)


@pytest.fixture(scope="session")
def ellipse_spec():
    return normalize_unit_perimeter(CurveSpec.ellipse(2.0, 1.0))


@pytest.fixture(scope="session")
def ellipse_curve(ellipse_spec):
    return build_affine_curve(ellipse_spec, 2048)


@pytest.fixture(scope="session")
def axial_spec():
    # mode-3 axial perturbation used by the expansion-order experiments
    return normalize_unit_perimeter(CurveSpec.radial(1.0, cos=(0.0, 0.0, 5e-3)))


@pytest.fixture(scope="session")
def axial_curve(axial_spec):
    return build_affine_curve(axial_spec, 4096)


@pytest.fixture(scope="session")
def central_spec():
    # mode-4 centrally symmetric perturbation (not Radon)
    return normalize_unit_perimeter(CurveSpec.radial(1.0, cos=(0.0, 0.0, 0.0, 1e-2)))


@pytest.fixture(scope="session")
def central_curve(central_spec):
    return build_affine_curve(central_spec, 2048)
