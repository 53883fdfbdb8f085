"""Truncated univariate Taylor series ("jets") with vectorized coefficients.

A TaylorSeries of order K stores coefficients c[0..K]; each c[q] may itself
be an ndarray (one entry per evaluation point), so a single series object
carries the derivative tower of a function at many abscissae at once.
Coefficients are Taylor-normalized: f(x0 + h) = sum_q c[q] h^q.
"""

import numpy as np


class TaylorSeries:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def variable(cls, x0, order):
        """The series of x itself around x0 (x0 scalar or ndarray)."""
        x0 = np.asarray(x0, dtype=complex)
        c = np.zeros((order + 1,) + x0.shape, dtype=complex)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order, shape=()):
        c = np.zeros((order + 1,) + shape, dtype=complex)
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return self.c.shape[0] - 1

    def __len__(self):
        return self.c.shape[0]

    def truncate(self, order):
        if order >= self.order:
            return self
        return TaylorSeries(self.c[: order + 1])

    def _coerce(self, other):
        if isinstance(other, TaylorSeries):
            return other
        return TaylorSeries.constant(other, self.order, self.c.shape[1:])

    def __add__(self, other):
        o = self._coerce(other)
        n = min(len(self), len(o))
        return TaylorSeries(self.c[:n] + o.c[:n])

    __radd__ = __add__

    def __neg__(self):
        return TaylorSeries(-self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TaylorSeries):
            return TaylorSeries(self.c * other)
        n = min(len(self), len(other))
        a, b = self.c[:n], other.c[:n]
        out = np.zeros_like(a)
        for q in range(n):
            # sum_{i} a[i] b[q-i]
            out[q] = np.sum(a[: q + 1] * b[q::-1], axis=0)
        return TaylorSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TaylorSeries):
            return TaylorSeries(self.c / other)
        n = min(len(self), len(other))
        a, b = self.c[:n], other.c[:n]
        out = np.zeros_like(a)
        out[0] = a[0] / b[0]
        for q in range(1, n):
            out[q] = (a[q] - np.sum(out[:q] * b[q:0:-1], axis=0)) / b[0]
        return TaylorSeries(out)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            result = TaylorSeries.constant(1.0, self.order, self.c.shape[1:])
            base = self
            n = p
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        return (self.log() * p).exp()

    def exp(self):
        n = len(self)
        u = self.c
        out = np.zeros_like(u)
        out[0] = np.exp(u[0])
        for q in range(1, n):
            # f' = u' f  =>  q f_q = sum_{j=1..q} j u_j f_{q-j}
            j = np.arange(1, q + 1).reshape((-1,) + (1,) * (u.ndim - 1))
            out[q] = np.sum(j * u[1 : q + 1] * out[q - 1 :: -1][:q], axis=0) / q
        return TaylorSeries(out)

    def log(self):
        n = len(self)
        u = self.c
        out = np.zeros_like(u)
        out[0] = np.log(u[0])
        for q in range(1, n):
            # g' = u'/u  =>  u_0 q g_q = q u_q - sum_{j=1..q-1} j g_j u_{q-j}
            if q == 1:
                out[1] = u[1] / u[0]
                continue
            j = np.arange(1, q).reshape((-1,) + (1,) * (u.ndim - 1))
            s = np.sum(j * out[1:q] * u[q - 1 : 0 : -1], axis=0)
            out[q] = (u[q] - s / q) / u[0]
        return TaylorSeries(out)

    def sqrt(self):
        return (self.log() * 0.5).exp()

    def _expi(self, sign):
        return (self * (1j * sign)).exp()

    def sin(self):
        return (self._expi(1) - self._expi(-1)) / 2j

    def cos(self):
        return (self._expi(1) + self._expi(-1)) / 2.0

    def sinh(self):
        return (self.exp() - (-self).exp()) / 2.0

    def cosh(self):
        return (self.exp() + (-self).exp()) / 2.0

    def deriv(self):
        """Series of the derivative function (order drops by one)."""
        if self.order == 0:
            return TaylorSeries(np.zeros_like(self.c))
        q = np.arange(1, len(self)).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return TaylorSeries(self.c[1:] * q)

    def eval(self, h):
        """Evaluate the truncated series at offset h (scalar or ndarray)."""
        h = np.asarray(h, dtype=complex)
        out = np.zeros(np.broadcast_shapes(h.shape, self.c.shape[1:]), dtype=complex)
        for q in range(self.order, -1, -1):
            out = out * h + self.c[q]
        return out

    def shift_tail(self, r):
        """Series of f^(r)(x0 + h) / r! given this series of f; length drops by r."""
        if r == 0:
            return self
        if r > self.order:
            return TaylorSeries(np.zeros((1,) + self.c.shape[1:], dtype=complex))
        q = np.arange(r, len(self))
        from scipy.special import comb

        w = comb(q, r).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return TaylorSeries(self.c[r:] * w)
