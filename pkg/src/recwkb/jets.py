"""Truncated bivariate power series in a step variable h and in eps.

A Jet of orders (R, T) stores coefficients c[r, t] of h^r eps^t, truncated
beyond either order. Products agree with the truncation of the full product,
exp/log are defined whenever the (0, 0) term allows it. Coefficient entries
may carry an extra trailing axis (one slot per grid node), which keeps all
jet algebra vectorized over an abscissa grid.
"""

import numpy as np

from .errors import OrderOverflow
from .series import TaylorSeries


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def zeros(cls, R, T, shape=()):
        return cls(np.zeros((R + 1, T + 1) + shape, dtype=complex))

    @classmethod
    def constant(cls, value, R, T, shape=()):
        j = cls.zeros(R, T, shape)
        j.c[0, 0] = value
        return j

    @property
    def orders(self):
        return self.c.shape[0] - 1, self.c.shape[1] - 1

    @property
    def shape(self):
        return self.c.shape[2:]

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        R, T = self.orders
        return Jet.constant(other, R, T, self.shape)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet(self.c + o.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        R, T = self.orders
        a, b = self.c, other.c
        out = np.zeros_like(a)
        for r in range(R + 1):
            for t in range(T + 1):
                out[r, t] = np.sum(
                    a[: r + 1, : t + 1] * b[r::-1, t::-1], axis=(0, 1)
                )
        return Jet(out)

    __rmul__ = __mul__

    def eps_coefficient(self, t):
        """Coefficient of eps^t as a TaylorSeries in h."""
        return TaylorSeries(self.c[:, t])

    def h_constant_series(self):
        """The h^0 row as a TaylorSeries in eps."""
        return TaylorSeries(self.c[0, :])

    def exp(self):
        """exp of the jet; requires nothing beyond a finite (0,0) term."""
        R, T = self.orders
        # split off the pure-h part (a TaylorSeries exp), the rest is
        # nilpotent in eps and the exponential series terminates
        base = TaylorSeries(self.c[:, 0]).exp()
        E0 = Jet.zeros(R, T, self.shape)
        E0.c[:, 0] = base.c
        N = Jet(self.c.copy())
        N.c[:, 0] = 0.0
        acc = Jet.constant(1.0, R, T, self.shape)
        for m in range(T, 0, -1):
            acc = Jet.constant(1.0, R, T, self.shape) + (N * acc) * (1.0 / m)
        return E0 * acc

    def log(self):
        """log of the jet; the h^0, eps^0 coefficient must be nonzero."""
        R, T = self.orders
        base = TaylorSeries(self.c[:, 0])
        inv0 = Jet.zeros(R, T, self.shape)
        inv0.c[:, 0] = (1.0 / base).c
        L0 = Jet.zeros(R, T, self.shape)
        L0.c[:, 0] = base.log().c
        N = Jet(self.c.copy())
        N.c[:, 0] = 0.0
        M = inv0 * N  # O(eps)
        acc = Jet.zeros(R, T, self.shape)
        power = Jet.constant(1.0, R, T, self.shape)
        for m in range(1, T + 1):
            power = power * M
            acc = acc + power * ((-1.0) ** (m + 1) / m)
        return L0 + acc

    def eval(self, h, eps):
        """Evaluate the truncated polynomial at (h, eps)."""
        R, T = self.orders
        hp = h ** np.arange(R + 1)
        ep = eps ** np.arange(T + 1)
        w = np.einsum("r,t->rt", hp, ep)
        return np.tensordot(w, self.c, axes=([0, 1], [0, 1]))


def jet_compose_exponent(phi_list, x0, j, R, T, towers=None):
    """Jet of the step-ratio factor of a formal exponential solution.

    Given fields Phi_0..Phi_S (phi_list) and an integer step j, expand

        exp( eps^-1 * sum_t Phi_t(x0 + j*eps) * eps^t ) / exp( eps^-1 * Phi_0(x0) )

    in powers of eps, tracking the step-offset Taylor order in the h slot:
    the (r, p) entry carries the h^r-order contribution (with j^r folded in)
    to the eps^p coefficient of the exponent's exponential. Summing each eps
    column (Jet.eval with h=1) evaluates the expansion at the given j.

    towers, if given, supplies the Taylor coefficients of each Phi_t at x0
    (sequence of 1-d arrays, tau[t][q] = Phi_t^(q)(x0)/q!); otherwise they
    are computed from the fields' own derivative machinery.
    """
    if len(phi_list) == 0:
        raise ValueError("phi_list must contain at least Phi_0")
    if towers is None:
        # terms tau[q] only enter for q <= R and q - 1 <= T
        need = min(R, T + 1)
        towers = [f.taylor(x0, need).c for f in phi_list]
    E = Jet.zeros(R, T)
    for t, tau in enumerate(towers):
        qmax = len(tau) - 1
        if t == 0 and qmax < 1:
            raise OrderOverflow("Phi_0 tower provides no derivative at x0")
        if t >= 1 and t - 1 <= T:
            E.c[0, t - 1] += tau[0]
        for q in range(1, qmax + 1):
            p = t + q - 1  # eps power carried by (j*eps)^q at level t
            if p > T or q > R:
                continue
            E.c[q, p] += (j**q) * tau[q]
    return E.exp()
