"""Recurrence problems: coefficient families a_j(x, eps), presets, file format.

A problem is  sum_{j=0..l} a_j(k*eps, eps) y_{k+j} = 0  on an interval, with
each a_j given as a truncated power series in eps whose terms are smooth
functions of x, plus an optional exact closed form in (x, eps) used by the
exact-iteration oracle.

File format (UTF-8, line oriented, '#' comments):

    name  <label>
    order <l>
    interval <a> <b>
    coeff <j> epspow <s> : <expression in x>
    exact <j> : <expression in x, eps>
"""

import numpy as np

from .errors import NonsingularityViolation, ParseError, UnknownPreset
from .expressions import Expression
from .fields import ScalarField

NONSINGULAR_SCAN = 256
NONSINGULAR_TOL = 1e-9


class EpsSeriesField:
    """Truncated eps-power series of smooth coefficient functions of x."""

    def __init__(self, terms, exprs=None):
        self.terms = list(terms)  # ScalarField per eps power, index = power
        self.exprs = exprs  # parallel list of Expression or None

    @property
    def order(self):
        return len(self.terms) - 1

    def term(self, s):
        return self.terms[s] if s < len(self.terms) else None

    def eval_series(self, x, eps):
        """Sum of the truncated series at (x, eps)."""
        x = np.asarray(x)
        total = np.zeros(x.shape, dtype=complex)
        for s, f in enumerate(self.terms):
            total = total + f(x) * eps**s
        return total

    def taylor_term(self, s, x0, order):
        """Taylor tower of term s at x0 (exact when expression-backed)."""
        f = self.term(s)
        if f is None:
            return None
        return f.taylor(x0, order)


class RecurrenceSpec:
    """An l-step recurrence problem on an interval."""

    def __init__(self, l, interval, coeffs, exact_exprs=None, name="unnamed"):
        if l < 1:
            raise ValueError("order l must be >= 1")
        if len(coeffs) != l + 1:
            raise ValueError("need exactly l+1 coefficient series")
        self.l = l
        self.interval = (float(interval[0]), float(interval[1]))
        self.coeffs = list(coeffs)
        self.exact_exprs = exact_exprs  # list of Expression in (x, eps) or None
        self.name = name
        self._check_nonsingular()

    def _check_nonsingular(self):
        lo, hi = self.interval
        x = np.linspace(lo, hi, NONSINGULAR_SCAN)
        for j, label in ((0, "a_0"), (self.l, f"a_{self.l}")):
            vals = self.coeffs[j].terms[0](x)
            m = np.abs(vals).min()
            if m < NONSINGULAR_TOL:
                xm = x[int(np.argmin(np.abs(vals)))]
                raise NonsingularityViolation(
                    f"{label}(x, 0) vanishes near x = {xm:.6g} (min |{label}| = {m:.2e})"
                )

    def coeff_value(self, j, x, eps, exact=True):
        """Coefficient a_j at (x, eps); exact closed form when available."""
        if exact and self.exact_exprs is not None and self.exact_exprs[j] is not None:
            xx = np.asarray(x, dtype=complex)
            return self.exact_exprs[j](x=xx, eps=eps)
        return self.coeffs[j].eval_series(x, eps)

    def coeff_exact_mp(self, j, x, eps):
        """Exact coefficient in mpmath arithmetic (falls back to the series)."""
        import mpmath

        if self.exact_exprs is not None and self.exact_exprs[j] is not None:
            return self.exact_exprs[j](x=mpmath.mpf(x), eps=mpmath.mpf(eps))
        total = mpmath.mpc(0)
        for s, expr in enumerate(self.coeffs[j].exprs or []):
            if expr is None:
                v = mpmath.mpc(complex(self.coeffs[j].terms[s](x)))
            else:
                v = expr(x=mpmath.mpf(x))
            total += v * mpmath.mpf(eps) ** s
        return total

    def char_coeffs0(self, x):
        """Values a_j(x, 0) for j = 0..l at points x."""
        return np.array([c.terms[0](x) for c in self.coeffs])


# ---------------------------------------------------------------------------
# file format


def _field_from_expr(expr, interval):
    fn = lambda x: np.asarray(expr(x=np.asarray(x, dtype=complex)), dtype=complex) + np.zeros(np.shape(x), dtype=complex)

    def jet_fn(x0, order):
        from .series import TaylorSeries

        xs = TaylorSeries.variable(np.asarray(x0, dtype=complex), order)
        v = expr(x=xs)
        if not isinstance(v, TaylorSeries):
            v = TaylorSeries.constant(v, order, np.shape(x0))
        return v

    return ScalarField.from_function(fn, interval, jet_fn=jet_fn)


def parse_spec(text):
    """Parse a problem document into a validated RecurrenceSpec."""
    name = "unnamed"
    order = None
    interval = None
    coeff_entries = {}  # (j, s) -> Expression
    exact_entries = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "name":
                name = line[len("name") :].strip()
            elif head == "order":
                order = int(parts[1])
            elif head == "interval":
                interval = (float(parts[1]), float(parts[2]))
            elif head == "coeff":
                j = int(parts[1])
                if parts[2] != "epspow":
                    raise ParseError("expected 'epspow'", lineno, raw.find(parts[2]) + 1)
                s = int(parts[3])
                _, expr_text = line.split(":", 1)
                coeff_entries[(j, s)] = Expression(expr_text, variables=("x",), line=lineno)
            elif head == "exact":
                j = int(parts[1])
                _, expr_text = line.split(":", 1)
                exact_entries[j] = Expression(expr_text, variables=("x", "eps"), line=lineno)
            else:
                raise ParseError(f"unknown directive {head!r}", lineno, 1)
        except (IndexError, ValueError) as exc:
            raise ParseError(f"malformed line: {exc}", lineno, 1) from None

    if order is None:
        raise ParseError("missing 'order' directive", 0, 0)
    if interval is None:
        raise ParseError("missing 'interval' directive", 0, 0)

    coeffs = []
    for j in range(order + 1):
        powers = sorted(s for (jj, s) in coeff_entries if jj == j)
        if not powers and j in (0, order):
            raise ParseError(f"no coefficient given for j = {j}", 0, 0)
        smax = powers[-1] if powers else 0
        terms, exprs = [], []
        for s in range(smax + 1):
            expr = coeff_entries.get((j, s))
            if expr is None:
                expr = Expression("0", variables=("x",))
            terms.append(_field_from_expr(expr, interval))
            exprs.append(expr)
        coeffs.append(EpsSeriesField(terms, exprs))

    exact = None
    if exact_entries:
        exact = [exact_entries.get(j) for j in range(order + 1)]
    spec = RecurrenceSpec(order, interval, coeffs, exact_exprs=exact, name=name)
    spec.source = serialize(spec)
    return spec


def serialize(spec):
    """Problem document text reproducing the spec's coefficients."""
    lines = [f"name {spec.name}", f"order {spec.l}",
             f"interval {spec.interval[0]:.17g} {spec.interval[1]:.17g}"]
    for j, c in enumerate(spec.coeffs):
        for s, expr in enumerate(c.exprs or []):
            if expr is not None and expr.text != "0":
                lines.append(f"coeff {j} epspow {s} : {expr.text}")
    if spec.exact_exprs:
        for j, expr in enumerate(spec.exact_exprs):
            if expr is not None:
                lines.append(f"exact {j} : {expr.text}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# presets

_PRESET_DOCS = {
    "euler": """
name euler
order 1
interval 0 1
coeff 0 epspow 0 : -exp(exp(x))
coeff 1 epspow 0 : 1
exact 0 : -exp(exp(x))
exact 1 : 1
""",
    # Second-order three-term recurrence with a generic root crossing at
    # x = 0; the eps term in a_1 accounts for writing the symmetric form
    # y_{k+1} + y_{k-1} = 2(1+x) y_k with coefficients sampled at x = k*eps.
    "bessel": """
name bessel
order 2
interval {lo} {hi}
coeff 0 epspow 0 : 1
coeff 1 epspow 0 : -2*(1+x)
coeff 1 epspow 1 : -2
coeff 2 epspow 0 : 1
exact 0 : 1
exact 1 : -2*(1+x)-2*eps
exact 2 : 1
""",
    "euler_scheme": """
name euler_scheme
order 2
interval 0 1
coeff 0 epspow 0 : 1
coeff 1 epspow 0 : -2
coeff 1 epspow 2 : -({q})
coeff 2 epspow 0 : 1
exact 0 : 1
exact 1 : -2-eps^2*({q})
exact 2 : 1
""",
}

PRESET_NAMES = tuple(_PRESET_DOCS)


def preset(name, interval=None, q="1"):
    """Built-in problems: euler, bessel, euler_scheme.

    interval overrides the default (bessel defaults to [0.5, 1.5]; pass an
    interval containing 0 to study its root crossing). q is the potential
    expression for euler_scheme.
    """
    if name not in _PRESET_DOCS:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    doc = _PRESET_DOCS[name]
    if name == "bessel":
        lo, hi = interval if interval is not None else (0.5, 1.5)
        doc = doc.format(lo=repr(float(lo)), hi=repr(float(hi)))
        interval = None
    if name == "euler_scheme":
        doc = doc.format(q=q)
    spec = parse_spec(doc)
    if interval is not None:
        spec = _reinterval(spec, interval)
    return spec


def _reinterval(spec, interval):
    doc_lines = serialize(spec).splitlines()
    out = []
    for line in doc_lines:
        if line.startswith("interval"):
            out.append(f"interval {interval[0]:.17g} {interval[1]:.17g}")
        else:
            out.append(line)
    return parse_spec("\n".join(out))
