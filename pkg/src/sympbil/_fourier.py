"""Truncated trigonometric series for smooth 1-periodic real functions.

Everything downstream (boundary curves, affine curvature tables, deformation
weights) is periodic and analytic, so a plain rfft of uniform samples gives
spectrally accurate interpolation, differentiation and antidifferentiation.
Coefficients below roundoff are dropped at construction, which keeps
point evaluation cheap (O(K) per point with K the retained bandwidth).
"""

import numpy as np

_TWO_PI = 2.0 * np.pi

# evaluation is chunked so the (n_points, K) phase matrix stays modest
_PHASE_BUDGET = 1 << 21


class TrigSeries:
    """f(s) = mean + sum_{k=1..K} Re(a_k exp(2*pi*i*k*s)) on s in [0, 1)."""

    __slots__ = ("mean", "coeffs", "_k")

    def __init__(self, mean, coeffs):
        self.mean = float(mean)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self._k = np.arange(1, self.coeffs.size + 1)

    @classmethod
    def from_samples(cls, values, cutoff=1e-15):
        """Build from uniform samples f(j/N), truncating negligible modes.

        `cutoff` is relative to the largest spectral amplitude; modes below
        it contribute less than roundoff to any evaluation.
        """
        values = np.asarray(values, dtype=float)
        n = values.size
        c = np.fft.rfft(values)
        a = 2.0 * c[1:] / n
        if n % 2 == 0 and a.size:
            a[-1] *= 0.5  # Nyquist mode appears once, not twice
        mags = np.abs(a)
        top = mags.max() if mags.size else 0.0
        floor = max(abs(c[0].real / n), top) * cutoff
        keep = np.nonzero(mags > floor)[0]
        k_max = keep[-1] + 1 if keep.size else 0
        return cls(c[0].real / n, a[:k_max])

    @property
    def bandwidth(self):
        return self.coeffs.size

    def _accumulate(self, flat, weights, out):
        step = max(1, _PHASE_BUDGET // max(1, self._k.size))
        for lo in range(0, flat.size, step):
            chunk = flat[lo:lo + step]
            phase = np.exp((_TWO_PI * 1j) * np.outer(chunk, self._k))
            out[lo:lo + chunk.size] += (phase @ weights).real

    def __call__(self, s, deriv=0):
        """Evaluate the series (or its deriv-th derivative) at s (mod 1)."""
        s_arr = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s_arr).ravel()
        out = np.full(flat.size, self.mean if deriv == 0 else 0.0)
        if self.coeffs.size:
            w = self.coeffs * (_TWO_PI * 1j * self._k) ** deriv
            self._accumulate(flat, w, out)
        if s_arr.ndim == 0:
            return float(out[0])
        return out.reshape(s_arr.shape)

    def derivative(self, order=1):
        w = self.coeffs * (_TWO_PI * 1j * self._k) ** order
        return TrigSeries(0.0, w)

    def antiderivative(self, s):
        """Integral of f from 0 to s; equals mean*s plus a periodic part."""
        s_arr = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s_arr).ravel().astype(float)
        out = self.mean * flat
        if self.coeffs.size:
            b = self.coeffs / (_TWO_PI * 1j * self._k)
            out -= np.sum(b).real
            self._accumulate(flat, b, out)
        if s_arr.ndim == 0:
            return float(out[0])
        return out.reshape(s_arr.shape)


def invert_monotone(series_value, series_slope, targets, table_x, table_y,
                    tol=1e-14, max_iter=60):
    """Solve series_value(x) = t for each target t by Newton's method.

    `series_value` must be strictly increasing; (table_x, table_y) is a
    monotone sample table used for the initial guess.  Vectorized over
    targets; all iterates move in lockstep.
    """
    targets = np.asarray(targets, dtype=float)
    idx = np.clip(np.searchsorted(table_y, targets), 1, table_y.size - 1)
    y0, y1 = table_y[idx - 1], table_y[idx]
    x0, x1 = table_x[idx - 1], table_x[idx]
    gap = np.where(y1 > y0, y1 - y0, 1.0)
    x = x0 + (targets - y0) / gap * (x1 - x0)
    for _ in range(max_iter):
        step = (series_value(x) - targets) / series_slope(x)
        x -= step
        if np.max(np.abs(step)) < tol:
            break
    return x
