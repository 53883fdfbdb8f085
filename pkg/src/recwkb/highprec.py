"""mpmath helpers for validation-grade evaluation.

Double precision cannot certify residuals of order eps^4 at eps ~ 3e-4: the
order-by-order cancellations sit below the rounding floor of the root
values and of eps^-1 * Phi_0. The helpers here re-polish characteristic
roots in mpmath, rebuild the leading phase integral with an mpmath
Chebyshev transform, and evaluate formal solutions without that floor.
"""

import math

import mpmath

DPS = 40


def _mp(z):
    z = complex(z)
    return mpmath.mpc(z.real, z.imag)


def _coeff0_mp(spec, j, x):
    exprs = spec.coeffs[j].exprs
    if exprs and exprs[0] is not None:
        return exprs[0](x=mpmath.mpf(x))
    return _mp(spec.coeffs[j].terms[0](x))


def polish_root_mp(spec, x, seed):
    """Newton-polish a characteristic root (eps = 0) at x in mpmath."""
    with mpmath.workdps(DPS):
        a = [_coeff0_mp(spec, j, x) for j in range(spec.l + 1)]
        lam = _mp(seed)
        for _ in range(10):
            p = a[spec.l]
            for j in range(spec.l - 1, -1, -1):
                p = p * lam + a[j]
            dp = spec.l * a[spec.l]
            for j in range(spec.l - 1, 0, -1):
                dp = dp * lam + j * a[j]
            step = p / dp
            lam = lam - step
            if abs(step) < mpmath.mpf(10) ** (-DPS + 4) * (1 + abs(lam)):
                break
        return lam


def continuous_log_mp(lam_mp, reference_log):
    """mp log of lam shifted onto the continuous branch near reference_log."""
    with mpmath.workdps(DPS):
        val = mpmath.log(lam_mp)
        turns = round((complex(reference_log).imag - float(mpmath.im(val))) / (2 * math.pi))
        return val + mpmath.mpc(0, 2 * math.pi) * turns


_COS_CACHE = {}


def _mp_cos_table(n):
    if n not in _COS_CACHE:
        with mpmath.workdps(DPS):
            _COS_CACHE[n] = [
                [mpmath.cos(mpmath.pi * i * k / n) for k in range(n + 1)]
                for i in range(n + 1)
            ]
    return _COS_CACHE[n]


def _mp_vals_to_coeffs(values_mp):
    """Chebyshev coefficients from mp values on the ascending Lobatto grid."""
    n = len(values_mp) - 1
    tab = _mp_cos_table(n)
    v = list(reversed(values_mp))  # descending-node convention
    with mpmath.workdps(DPS):
        out = []
        for k in range(n + 1):
            s = v[0] / 2 * tab[0][k] + v[n] / 2 * tab[n][k]
            for i in range(1, n):
                s += v[i] * tab[i][k]
            s *= mpmath.mpf(2) / n
            if k in (0, n):
                s /= 2
            out.append(s)
    return out


class MpChebFit:
    """mpmath Chebyshev interpolant on an interval from mp node values."""

    def __init__(self, interval, values_mp):
        self.lo, self.hi = float(interval[0]), float(interval[1])
        self.coeffs = _mp_vals_to_coeffs(values_mp)

    @classmethod
    def _from_coeffs(cls, interval, coeffs):
        f = cls.__new__(cls)
        f.lo, f.hi = float(interval[0]), float(interval[1])
        f.coeffs = coeffs
        return f

    def antiderivative(self, base):
        """Antiderivative vanishing at base (mirrors chebint term by term)."""
        c = self.coeffs
        n = len(c)
        halfwidth = mpmath.mpf(self.hi - self.lo) / 2
        with mpmath.workdps(DPS):
            tmp = [mpmath.mpc(0)] * (n + 1)
            tmp[1] = c[0] * halfwidth
            if n > 1:
                tmp[2] = c[1] / 4 * halfwidth
            for j in range(2, n):
                tmp[j + 1] = tmp[j + 1] + c[j] / (2 * (j + 1)) * halfwidth
                tmp[j - 1] = tmp[j - 1] - c[j] / (2 * (j - 1)) * halfwidth
            out = MpChebFit._from_coeffs((self.lo, self.hi), tmp)
            out.coeffs[0] = out.coeffs[0] - out(base)
            return out

    def __call__(self, x):
        with mpmath.workdps(DPS):
            t = (mpmath.mpf(x) - self.lo) * 2 / (self.hi - self.lo) - 1
            b1 = mpmath.mpc(0)
            b2 = mpmath.mpc(0)
            for ck in reversed(self.coeffs[1:]):
                b1, b2 = 2 * t * b1 - b2 + ck, b1
            return t * b1 - b2 + self.coeffs[0]
