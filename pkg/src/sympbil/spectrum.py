"""Area spectrum samples, Mather beta values and coefficient fits.

Delta_q is the action (twice the area) of the symmetric maximizing orbit
of rotation number 1/q, beta(1/q) = -Delta_q / q, and the expansion
beta(1/q) ~ beta1/q + beta3/q^3 + beta5/q^5 + beta7/q^7 is recovered by a
weighted least-squares fit in powers of 1/q^2.

Only maximizing symmetric orbits (and their integer multiples) enter the
spectrum sample; enumerating all closed trajectories is not attempted.
"""

from dataclasses import dataclass

import numpy as np

from . import orbits

SPECTRUM_NOTE = ("sample restricted to maximizing symmetric orbits and "
                 "integer multiples; non-maximizing orbit actions are "
                 "not enumerated")


@dataclass
class BetaFit:
    q_min: int
    q_max: int
    beta1: float
    beta3: float
    beta5: float
    beta7: float
    residual_norm: float
    condition: float
    ill_conditioned: bool

    @property
    def coefficients(self):
        return (self.beta1, self.beta3, self.beta5, self.beta7)

    def model(self, q):
        q = np.asarray(q, dtype=float)
        return (self.beta1 + self.beta3 / q**2 + self.beta5 / q**4
                + self.beta7 / q**6)


@dataclass
class SpectrumEntry:
    value: float
    kind: str       # "orbit" or "area"
    q: int          # 0 for area entries
    multiple: int


def _maximizer(curve, q, symmetry):
    if symmetry == "axial":
        return orbits.maximize_axial(curve, q)
    if symmetry == "central":
        return orbits.maximize_central(curve, q)
    if symmetry == "free":
        return orbits.maximize_free(curve, q)
    raise ValueError(f"unknown symmetry {symmetry!r}")


def delta_q(curve, q, symmetry="axial"):
    """Twice the maximal area of the symmetric 1/q orbit."""
    return _maximizer(curve, q, symmetry).action


def mather_beta(curve, q, symmetry="axial"):
    """beta(1/q) = -(2/q) * (maximal area) = -Delta_q / q."""
    return -delta_q(curve, q, symmetry) / q


def fit_beta_coeffs(curve, q_min, q_max, symmetry="axial",
                    condition_limit=1e12):
    """Least-squares fit of q*beta(1/q) = b1 + b3/q^2 + b5/q^4 + b7/q^6.

    Rows are weighted by q^6 so the neglected 1/q^8 model term does not
    pollute the low-order coefficients; columns are equilibrated before
    solving.  The reported residual norm is unweighted.
    """
    if q_max < q_min + 8:
        raise ValueError("need q_max >= q_min + 8 for a meaningful fit")
    qs = np.arange(q_min, q_max + 1, dtype=float)
    y = np.array([-delta_q(curve, int(q), symmetry) for q in qs])
    design = np.stack([qs**0, qs**-2, qs**-4, qs**-6], axis=1)
    w = qs**6
    weighted = design * w[:, None]
    col = np.linalg.norm(weighted, axis=0)
    coef, *_ = np.linalg.lstsq(weighted / col, y * w, rcond=None)
    coef = coef / col
    condition = float(np.linalg.cond(weighted))
    residual = float(np.linalg.norm(design @ coef - y))
    return BetaFit(q_min=int(q_min), q_max=int(q_max),
                   beta1=float(coef[0]), beta3=float(coef[1]),
                   beta5=float(coef[2]), beta7=float(coef[3]),
                   residual_norm=residual, condition=condition,
                   ill_conditioned=condition > condition_limit)


def area_spectrum_sample(curve, q_max, m_max, symmetry="axial"):
    """Sorted multiples of maximizing actions and of the domain area.

    Returns SpectrumEntry records sorted by value, tagged with their
    provenance (orbit period q or the enclosed area) and the multiple m.
    """
    if q_max < 3:
        raise ValueError("q_max must be at least 3")
    entries = []
    area = curve.enclosed_area
    for m in range(1, m_max + 1):
        entries.append(SpectrumEntry(value=m * area, kind="area", q=0,
                                     multiple=m))
    for q in range(3, q_max + 1):
        dq = delta_q(curve, q, symmetry)
        for m in range(1, m_max + 1):
            entries.append(SpectrumEntry(value=m * dq, kind="orbit", q=q,
                                         multiple=m))
    entries.sort(key=lambda e: (e.value, e.kind, e.q, e.multiple))
    return entries
