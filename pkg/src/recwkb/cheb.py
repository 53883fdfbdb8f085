"""Chebyshev-Lobatto machinery: grids, coefficient transforms, calculus.

Values live on ascending Lobatto nodes; coefficients are standard Chebyshev
coefficients on [-1, 1] composed with the affine map to the target interval.
"""

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct


def lobatto_nodes(n, lo=-1.0, hi=1.0):
    """Ascending Chebyshev-Lobatto grid with n+1 points on [lo, hi]."""
    x = -np.cos(np.pi * np.arange(n + 1) / n)
    return lo + (hi - lo) * (x + 1.0) / 2.0


def _dct1(v):
    if np.iscomplexobj(v):
        return dct(v.real, type=1) + 1j * dct(v.imag, type=1)
    return dct(v, type=1)


def vals_to_coeffs(vals):
    """Chebyshev coefficients from values on the ascending Lobatto grid."""
    v = np.asarray(vals)
    n = v.shape[0] - 1
    if n == 0:
        return v.copy()
    # DCT-I expects descending-node ordering (x = cos(pi*i/n))
    a = _dct1(v[::-1]) / n
    a[0] /= 2.0
    a[-1] /= 2.0
    return a


def coeffs_to_vals(coeffs):
    """Values on the ascending Lobatto grid from Chebyshev coefficients."""
    a = np.asarray(coeffs).copy()
    n = a.shape[0] - 1
    if n == 0:
        return a
    a[0] *= 2.0
    a[-1] *= 2.0
    return (_dct1(a) / 2.0)[::-1]


def cheb_eval(coeffs, t):
    """Evaluate a Chebyshev series at t in [-1, 1] (Clenshaw)."""
    return C.chebval(t, coeffs)


def coeff_derivative(coeffs, halfwidth):
    """Coefficients of the derivative; halfwidth = (hi - lo)/2 of the interval."""
    if len(coeffs) == 1:
        return np.zeros(1, dtype=coeffs.dtype)
    return C.chebder(coeffs) / halfwidth


def coeff_antiderivative(coeffs, halfwidth):
    """Coefficients of an antiderivative (integration constant arbitrary)."""
    return C.chebint(coeffs) * halfwidth


def diff_matrix(n, lo=-1.0, hi=1.0):
    """Dense differentiation matrix on the ascending Lobatto grid."""
    if n == 0:
        return np.zeros((1, 1))
    x = -np.cos(np.pi * np.arange(n + 1) / n)
    c = np.hstack([2.0, np.ones(n - 1), 2.0]) * (-1) ** np.arange(n + 1)
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D * (2.0 / (hi - lo))


def chop_tolerance(coeffs, rel=1e-13):
    """Index past which trailing coefficients are negligible."""
    a = np.abs(np.asarray(coeffs))
    scale = a.max() if a.size else 0.0
    if scale == 0.0:
        return 1
    keep = np.nonzero(a > rel * scale)[0]
    return int(keep[-1]) + 1 if keep.size else 1
