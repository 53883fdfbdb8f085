"""Smooth complex-valued functions on an interval (Chebyshev representation).

A ScalarField stores values on an ascending Chebyshev-Lobatto grid and a
matching coefficient vector. Differentiation and antidifferentiation act in
coefficient space; evaluation anywhere uses Clenshaw recurrence. Fields are
immutable: every operation returns a new field.

Fields may carry a `jet_fn` providing exact Taylor towers at arbitrary
points (expression-backed coefficients, root branches, transported phases);
`taylor` falls back to repeated spectral differentiation otherwise, which
is accurate only for modest orders.
"""

import numpy as np

from . import cheb
from .errors import BranchAmbiguity, NearZeroDivisor, OrderOverflow, RecwkbError
from .series import TaylorSeries

DEFAULT_N = 64
MAX_N = 2048
ADAPT_TOL = 1e-11


class ScalarField:
    __slots__ = ("lo", "hi", "values", "coeffs", "jet_fn")

    def __init__(self, interval, values, jet_fn=None):
        self.lo, self.hi = float(interval[0]), float(interval[1])
        if not self.hi > self.lo:
            raise ValueError("interval must satisfy lo < hi")
        self.values = np.asarray(values, dtype=complex)
        self.coeffs = cheb.vals_to_coeffs(self.values)
        self.jet_fn = jet_fn

    # -- construction -------------------------------------------------

    @classmethod
    def from_function(cls, fn, interval, n=None, jet_fn=None, adapt=True):
        """Sample fn on a Lobatto grid, doubling n until resolved.

        Two successive resolutions must agree to ADAPT_TOL (relative);
        adaptivity is skipped when n is given explicitly and adapt=False.
        """
        lo, hi = interval
        if n is not None and not adapt:
            x = cheb.lobatto_nodes(n, lo, hi)
            return cls(interval, fn(x), jet_fn=jet_fn)
        n = n or DEFAULT_N
        vals = fn(cheb.lobatto_nodes(n, lo, hi))
        while n < MAX_N:
            n2 = 2 * n
            x2 = cheb.lobatto_nodes(n2, lo, hi)
            v2 = np.asarray(fn(x2), dtype=complex)
            coarse = cheb.cheb_eval(cheb.vals_to_coeffs(vals), _unit(x2, lo, hi))
            scale = max(np.abs(v2).max(), 1.0)
            if np.abs(coarse - v2).max() <= ADAPT_TOL * scale:
                return cls(interval, vals, jet_fn=jet_fn)
            n, vals = n2, v2
        return cls(interval, vals, jet_fn=jet_fn)

    @classmethod
    def from_values(cls, interval, values, jet_fn=None):
        return cls(interval, values, jet_fn=jet_fn)

    @classmethod
    def constant(cls, value, interval, n=8):
        x = cheb.lobatto_nodes(n, *interval)
        return cls(interval, np.full_like(x, value, dtype=complex))

    # -- basics --------------------------------------------------------

    @property
    def interval(self):
        return (self.lo, self.hi)

    @property
    def n(self):
        return len(self.values) - 1

    @property
    def grid(self):
        return cheb.lobatto_nodes(self.n, self.lo, self.hi)

    def __call__(self, x):
        return cheb.cheb_eval(self.coeffs, _unit(np.asarray(x, dtype=float), self.lo, self.hi))

    def max_abs(self):
        return float(np.abs(self.values).max())

    # -- calculus ------------------------------------------------------

    def derivative(self):
        halfwidth = (self.hi - self.lo) / 2.0
        dc = cheb.coeff_derivative(self.coeffs, halfwidth)
        vals = cheb.cheb_eval(dc, _unit(self.grid, self.lo, self.hi))
        jfn = None
        if self.jet_fn is not None:
            parent = self.jet_fn
            jfn = lambda x0, order: parent(x0, order + 1).deriv()
        return ScalarField(self.interval, vals, jet_fn=jfn)

    def antiderivative(self, base=None):
        """Antiderivative vanishing at `base` (default: left endpoint)."""
        base = self.lo if base is None else float(base)
        halfwidth = (self.hi - self.lo) / 2.0
        ic = cheb.coeff_antiderivative(self.coeffs, halfwidth)
        ic[0] -= cheb.cheb_eval(ic, _unit(np.asarray(base), self.lo, self.hi))
        vals = cheb.cheb_eval(ic, _unit(self.grid, self.lo, self.hi))
        integrand = self

        def jfn(x0, order):
            tail = integrand.taylor(x0, max(order - 1, 0)).c
            q = np.arange(1, len(tail) + 1).reshape((-1,) + (1,) * (tail.ndim - 1))
            c = np.concatenate([np.zeros((1,) + tail.shape[1:], dtype=complex), tail / q])
            c[0] = cheb.cheb_eval(ic, _unit(np.asarray(x0), integrand.lo, integrand.hi))
            return TaylorSeries(c[: order + 1])

        return ScalarField(self.interval, vals, jet_fn=jfn)

    def taylor(self, x0, order):
        """TaylorSeries of the field at x0 (scalar or array of points)."""
        if self.jet_fn is not None:
            return self.jet_fn(x0, order).truncate(order)
        if order > max(self.n // 2, 4):
            raise OrderOverflow(
                f"taylor order {order} exceeds resolution capacity of n={self.n} grid"
            )
        halfwidth = (self.hi - self.lo) / 2.0
        x0 = np.asarray(x0)
        rows = []
        c = self.coeffs
        fact = 1.0
        for r in range(order + 1):
            rows.append(cheb.cheb_eval(c, _unit(x0, self.lo, self.hi)) / fact)
            c = cheb.coeff_derivative(c, halfwidth)
            fact *= r + 1
        return TaylorSeries(np.array(rows))

    # -- algebra -------------------------------------------------------

    def _binary(self, other, op):
        if isinstance(other, ScalarField):
            if (self.lo, self.hi) != (other.lo, other.hi):
                raise RecwkbError("field intervals differ")
            n = max(self.n, other.n)
            a = self.values if self.n == n else self(cheb.lobatto_nodes(n, self.lo, self.hi))
            b = other.values if other.n == n else other(cheb.lobatto_nodes(n, self.lo, self.hi))
            return ScalarField(self.interval, op(a, b))
        return ScalarField(self.interval, op(self.values, other), jet_fn=None)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarField):
            _check_divisor(other)
        return self._binary(other, lambda a, b: a / b)

    def __neg__(self):
        return ScalarField(self.interval, -self.values, jet_fn=None)

    def exp(self):
        return ScalarField(self.interval, np.exp(self.values))

    def log(self):
        """Continuous logarithm branch, principal value at the left endpoint."""
        _check_divisor(self, kind="log")
        mag = np.log(np.abs(self.values))
        ang = np.unwrap(np.angle(self.values))
        if len(ang) > 1 and np.abs(np.diff(ang)).max() > np.pi / 2:
            raise BranchAmbiguity(
                "argument of the field winds too fast between grid nodes"
            )
        return ScalarField(self.interval, mag + 1j * ang)

    def pow(self, p):
        if isinstance(p, int):
            return ScalarField(self.interval, self.values**p)
        return (self.log() * p).exp()

    def real_max_error_vs(self, fn):
        x = self.grid
        return float(np.abs(self.values - fn(x)).max())


def _unit(x, lo, hi):
    return 2.0 * (x - lo) / (hi - lo) - 1.0


def _check_divisor(g, kind="div", tol=1e-12):
    m = np.abs(g.values).min()
    scale = max(np.abs(g.values).max(), 1.0)
    if m < tol * scale:
        if kind == "log":
            raise BranchAmbiguity(
                f"field value within {m:.2e} of 0: no continuous log branch"
            )
        raise NearZeroDivisor(f"divisor has min |g| = {m:.2e}")


def field_algebra(f, g, op):
    """Pointwise algebra entry point: op in {add, mul, div, log, exp, pow}.

    Unary operations (log, exp) act on g and ignore f; pow computes f**g
    for a constant g (complex exponent via the continuous log branch).
    """
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "log":
        return g.log()
    if op == "exp":
        return g.exp()
    if op == "pow":
        return f.pow(g)
    raise ValueError(f"unknown op {op!r}")
