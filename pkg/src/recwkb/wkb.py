"""Order-by-order construction of exponential (WKB-type) expansions.

For one root branch lambda_m, the formal solution
exp( eps^-1 * sum_t Phi_t(x) eps^t ) is built by (i) the eikonal phase
Phi_0' = Log lambda_m, and (ii) cancelling the order-eps^(s+1) coefficient
of the recurrence residual to get each Phi_(s+1)'. The cancellation is
performed in truncated bivariate jets around every grid node at once, which
also yields exact Taylor towers of every Phi_t' (no repeated spectral
differentiation enters the recursion).

Residual magnitudes down to ~1e-30 are measurable via the mpmath path
(high=True), which re-polishes the root and the leading phase in extended
precision.
"""

import math

import mpmath
import numpy as np

from . import cheb, highprec
from .errors import DenominatorTooSmall, InsufficientDecades, OrderOverflow
from .fields import ScalarField
from .jets import Jet
from .series import TaylorSeries

DEFAULT_MAX_ORDER = 8
TOWER_EXTRA = 9
RESIDUAL_H_EXTRA = 8
DENOM_GUARD_REL = 1e-3


class PhiExpansion:
    """Phases Phi_0..Phi_S of one branch on a region, plus derivative towers.

    Integration constants: Phi_t(base_point) = 0 for t >= 1; Phi_0 also
    vanishes at base_point (a gauge choice, harmless to the solution space).
    """

    def __init__(self, spec, branch, region=None, base_point=None,
                 max_order=DEFAULT_MAX_ORDER, grid_n=128):
        lo, hi = region if region is not None else spec.interval
        if isinstance(branch, (int, np.integer)):
            # modulus rank on the region: re-track locally (safe near cusps)
            from .roots import region_branch

            branch = region_branch(spec, (lo, hi), int(branch), n=grid_n)
        self.spec = spec
        self.branch = branch
        self.region = (float(lo), float(hi))
        self.base_point = float(lo) if base_point is None else float(base_point)
        self.max_order = max_order
        self.grid_n = grid_n
        self.nodes = cheb.lobatto_nodes(grid_n, lo, hi)
        self.S = 0
        self._towers = []  # t -> TaylorSeries of Phi_t' over nodes
        self._mp_phi0 = None
        self._a_towers = None
        self._lam_pows = None
        self._init_phi0()

    # -- construction ----------------------------------------------------

    def _init_phi0(self):
        Q0 = self.max_order + TOWER_EXTRA
        lam_tower = self.branch.taylor(self.nodes, Q0)
        logtow = lam_tower.log()
        # continuous branch: override the principal-value constant row with
        # the unwrapped node values
        lam_field = ScalarField.from_values(self.region, lam_tower.c[0])
        loglam_field = lam_field.log()
        logtow.c[0] = loglam_field.values
        self._towers = [logtow]
        self._lam_tower = lam_tower
        phi0_prime = ScalarField.from_values(self.region, logtow.c[0])
        phi0 = phi0_prime.antiderivative(base=self.base_point)
        self.phis = [self._attach_tower_jet(phi0, 0)]

    def _attach_tower_jet(self, field, t):
        """Give a Phi_t field exact Taylor towers from the Phi_t' node towers."""
        towers = self._towers
        nodes = self.nodes

        def jet_fn(x0, order):
            x0a = np.atleast_1d(np.asarray(x0, dtype=float))
            idx = np.abs(x0a[:, None] - nodes[None, :]).argmin(axis=1)
            delta = x0a - nodes[idx]
            out = np.zeros((order + 1, len(x0a)), dtype=complex)
            out[0] = field(x0a)
            tow = towers[t]
            for r in range(1, order + 1):
                if r - 1 > tow.order:
                    break
                sh = tow.shift_tail(r - 1)  # (Phi_t')^(r-1)/(r-1)! recentred
                vals = np.array(
                    [TaylorSeries(sh.c[:, ii]).eval(dd) for ii, dd in zip(idx, delta)]
                )
                out[r] = vals / r  # Phi_t^(r)/r!
            res = TaylorSeries(out)
            if np.ndim(x0) == 0:
                res = TaylorSeries(out[:, 0])
            return res

        return ScalarField.from_values(self.region, field.values, jet_fn=jet_fn)

    @property
    def branch_id(self):
        return self.branch.branch_id

    def phi_fields(self):
        return list(self.phis)

    def tower_at_node(self, i, t):
        """Taylor coefficients of Phi_t around node i: tau[q] = Phi_t^(q)/q!."""
        tow = self._towers[t]
        c = tow.c[:, i]
        tau = np.zeros(len(c) + 1, dtype=complex)
        tau[1:] = c / np.arange(1, len(c) + 1)
        tau[0] = complex(self.phis[t](self.nodes[i]))
        return tau

    def nearest_node(self, x):
        return int(np.abs(self.nodes - x).argmin())

    def exponent_sum(self, x, eps, s=None):
        """sum_{t<=s} Phi_t(x) eps^t (double precision)."""
        s = self.S if s is None else s
        total = np.zeros(np.shape(x), dtype=complex)
        for t in range(s + 1):
            total = total + self.phis[t](x) * eps**t
        return total

    def mp_phi0(self):
        """mpmath interpolant of Phi_0 on the region (cached).

        Roots are re-polished at exact mp node positions; with double nodes
        the rounding of the abscissae alone would leave an O(1e-17/eps)
        floor in eps^-1 Phi_0.
        """
        if self._mp_phi0 is None:
            with mpmath.workdps(highprec.DPS):
                lo, hi = self.region
                n = self.grid_n
                vals = []
                for i in range(n + 1):
                    x_mp = lo + (hi - lo) * (1 - mpmath.cos(mpmath.pi * i / n)) / 2
                    seed = self._towers[0].c[0][i]
                    lam = highprec.polish_root_mp(self.spec, x_mp, np.exp(seed))
                    vals.append(highprec.continuous_log_mp(lam, seed))
                fit = highprec.MpChebFit(self.region, vals)
                self._mp_phi0 = fit.antiderivative(self.base_point)
        return self._mp_phi0

    def formal_log_mp(self, x, eps, s=None):
        """eps^-1 * sum_t Phi_t(x) eps^t in mpmath (mp-grade Phi_0 term).

        Pass x as an mpf (e.g. k * mpf(eps)) to avoid double rounding of
        the abscissa; see formal_log_mp_step.
        """
        s = self.S if s is None else s
        total = self.mp_phi0()(x) / mpmath.mpf(eps)
        xd = float(x)
        for t in range(1, s + 1):
            total += highprec._mp(self.phis[t](xd)) * mpmath.mpf(eps) ** (t - 1)
        return total

    def formal_log_mp_step(self, k, eps, s=None):
        """formal_log_mp at the exact abscissa k * eps (mp product)."""
        with mpmath.workdps(highprec.DPS):
            return self.formal_log_mp(k * mpmath.mpf(eps), eps, s=s)

    def truncated(self, s):
        """Lightweight view of this expansion at order s <= S."""
        if s > self.S:
            raise OrderOverflow(f"requested order {s} > computed order {self.S}")
        view = PhiExpansion.__new__(PhiExpansion)
        view.__dict__ = dict(self.__dict__)
        view.phis = self.phis[: s + 1]
        view._towers = self._towers[: s + 1]
        view.S = s
        return view


def eikonal(branch, base_point, spec=None, region=None, **kw):
    """Leading phase Phi_0 with Phi_0' = Log lambda, Phi_0(base_point) = 0.

    Returns the full expansion object at order 0; its first field is Phi_0.
    """
    spec = spec if spec is not None else branch.spec
    if spec is None:
        raise ValueError("branch carries no spec; pass spec=...")
    return PhiExpansion(spec, branch, region=region, base_point=base_point, **kw)


def _coeff_towers(phi, order):
    """Taylor towers of every a_{j,s} at the region nodes."""
    spec = phi.spec
    out = []
    for j in range(spec.l + 1):
        per_j = []
        for s in range(spec.coeffs[j].order + 1):
            per_j.append(spec.coeffs[j].taylor_term(s, phi.nodes, order))
        out.append(per_j)
    return out


def _exponent_jet(phi, j, R, T):
    """Jet (around every node) of the normalized step-ratio exponent.

    N_j(h, eps) = sum_t eps^(t-1) [Phi_t(x+h+j eps) - Phi_t(x+h)], assembled
    from the Phi_t' towers; its exp carries the eps-expansion of the formal
    solution ratio used by the order-(s+1) cancellation.
    """
    n = len(phi.nodes)
    E = Jet.zeros(R, T, (n,))
    for t in range(phi.S + 1):
        tow = phi._towers[t]
        qmax = tow.order + 1  # Phi_t towers reach one order above Phi_t'
        for q in range(1, qmax + 1):
            tau_q = tow.c[q - 1] / q
            for a in range(0, min(q, R + 1)):
                p = t + q - a - 1
                if p > T or p < 0:
                    continue
                E.c[a, p] += math.comb(q, a) * (j ** (q - a)) * tau_q
    return E.exp()


def transport_next(spec, phi):
    """Extend an expansion by one order: cancel the eps^(S+1) residual.

    Phi_(S+1)' = -(residual coefficient)/(sum_j j a_j0 lambda^j), then
    antidifferentiated with Phi_(S+1)(base_point) = 0.
    """
    s_new = phi.S + 1
    if s_new > phi.max_order:
        raise OrderOverflow(
            f"order {s_new} exceeds max_order={phi.max_order}; "
            "rebuild the expansion with a larger budget"
        )
    R = (phi.max_order - s_new) + RESIDUAL_H_EXTRA
    T = s_new
    n = len(phi.nodes)

    if phi._a_towers is None:
        phi._a_towers = _coeff_towers(phi, phi.max_order + RESIDUAL_H_EXTRA)
        lam_pows = [TaylorSeries.constant(1.0, phi._lam_tower.order, (n,))]
        for _ in range(spec.l):
            lam_pows.append(lam_pows[-1] * phi._lam_tower)
        phi._lam_pows = lam_pows

    resid = Jet.zeros(R, T, (n,))
    for j in range(spec.l + 1):
        Ej = _exponent_jet(phi, j, R, T)
        Aj = Jet.zeros(R, T, (n,))
        for s in range(min(spec.coeffs[j].order, T) + 1):
            tow = phi._a_towers[j][s]
            m = min(R, tow.order)
            Aj.c[: m + 1, s] = tow.c[: m + 1]
        resid = resid + Aj * Ej

    denom = None
    for j in range(1, spec.l + 1):
        term = phi._a_towers[j][0].truncate(R) * phi._lam_pows[j].truncate(R)
        term = TaylorSeries(term.c * j)
        denom = term if denom is None else denom + term
    dvals = np.abs(denom.c[0])
    if dvals.min() < DENOM_GUARD_REL * dvals.max():
        raise DenominatorTooSmall(
            "transport denominator nearly vanishes on the region "
            f"(min/max = {dvals.min():.3e}/{dvals.max():.3e}); "
            "this signals a root crossing: use the turning-point machinery"
        )

    rho = resid.eps_coefficient(s_new).truncate(R)
    new_tower = -(rho / denom.truncate(R))

    phi_prime = ScalarField.from_values(phi.region, new_tower.c[0])
    new_field = phi_prime.antiderivative(base=phi.base_point)

    out = PhiExpansion.__new__(PhiExpansion)
    out.__dict__ = dict(phi.__dict__)
    out._towers = phi._towers + [new_tower]
    out.S = s_new
    out.phis = phi.phis + [out._attach_tower_jet(new_field, s_new)]
    return out


def expand_branch(spec, branch, order, region=None, base_point=None,
                  max_order=None, grid_n=128):
    """Eikonal plus transport up to the requested order."""
    max_order = max(order, DEFAULT_MAX_ORDER) if max_order is None else max_order
    phi = PhiExpansion(spec, branch, region=region, base_point=base_point,
                       max_order=max_order, grid_n=grid_n)
    for _ in range(order):
        phi = transport_next(spec, phi)
    return phi


# ---------------------------------------------------------------------------
# residual evaluation


def formal_residual(spec, phi, eps, k, high=True):
    """Normalized recurrence residual of the truncated expansion at step k.

    Evaluates exp(-eps^-1 Phi_0(k eps)) * sum_j a_j(k eps, eps) *
    exp(eps^-1 sum_t Phi_t((k+j) eps) eps^t) using local Taylor towers for
    the phase differences. With high=True (default) the root value and the
    leading phase go through mpmath so the result is meaningful well below
    the double-precision cancellation floor.
    """
    x = k * eps
    lo, hi = phi.region
    if not (lo <= x and x + spec.l * eps <= hi):
        raise ValueError(f"steps k..k+l at eps={eps} leave the region {phi.region}")
    i = phi.nearest_node(x)
    xi = phi.nodes[i]
    delta = x - xi
    taus = [phi.tower_at_node(i, t) for t in range(phi.S + 1)]

    with mpmath.workdps(highprec.DPS):
        eps_mp = mpmath.mpf(eps)
        d_mp = mpmath.mpf(delta)
        if high:
            lam_seed = np.exp(taus[0][1])
            lam = highprec.polish_root_mp(spec, xi, lam_seed)
            log_lam = highprec.continuous_log_mp(lam, taus[0][1])
        else:
            log_lam = highprec._mp(taus[0][1])
        total = mpmath.mpc(0)
        for j in range(spec.l + 1):
            shift = d_mp + j * eps_mp
            # t = 0: the q = 1 coefficient is the (re-polished) log root
            e = log_lam * j
            for q in range(2, len(taus[0])):
                e += highprec._mp(taus[0][q]) * (shift**q - d_mp**q) / eps_mp
            for t in range(1, phi.S + 1):
                for q in range(1, len(taus[t])):
                    e += highprec._mp(taus[t][q]) * (shift**q - d_mp**q) * eps_mp ** (t - 1)
            if high:
                aj = spec.coeff_exact_mp(j, x, eps)
            else:
                aj = highprec._mp(spec.coeff_value(j, x, eps))
            total += aj * mpmath.exp(e)
        # restore the Eq-style normalization: only exp(-eps^-1 Phi_0) divided out
        tail = mpmath.mpc(0)
        for t in range(1, phi.S + 1):
            tail += highprec._mp(taus[t][0]) * eps_mp ** (t - 1)
        total *= mpmath.exp(tail)
        return complex(total)


def default_sample_ks(phi, eps, count=8, margin=2):
    """Integer steps near interior grid nodes, clear of the region edges."""
    lo, hi = phi.region
    span = hi - lo
    targets = np.linspace(lo + 0.1 * span, hi - 0.1 * span - phi.spec.l * eps, count)
    ks = sorted({int(round(x / eps)) for x in targets})
    return [k for k in ks if lo <= k * eps and (k + phi.spec.l + margin) * eps <= hi]


class OrderFit:
    def __init__(self, s, slope, constant, eps_list, residuals, exact=False):
        self.s = s
        self.slope = slope
        self.constant = constant
        self.eps_list = list(eps_list)
        self.residuals = list(residuals)
        self.exact = exact

    def __repr__(self):
        if self.exact:
            return f"OrderFit(s={self.s}, exact at noise floor)"
        return f"OrderFit(s={self.s}, slope={self.slope:.3f}, C={self.constant:.3g})"


def residual_order_fit(spec, phi, eps_list, sample_ks=None, high=True):
    """Log-log slope of max-|residual| vs eps for each order s <= S."""
    eps_list = sorted(eps_list, reverse=True)
    if len(eps_list) < 3 or eps_list[0] / eps_list[-1] < 10.0 - 1e-9:
        raise InsufficientDecades(
            "need >= 3 eps values spanning at least one decade"
        )
    scale = max(
        float(np.abs(spec.coeffs[j].terms[0].values).max()) for j in range(spec.l + 1)
    )
    fits = {}
    for s in range(phi.S + 1):
        view = phi.truncated(s)
        maxres = []
        for eps in eps_list:
            ks = sample_ks if sample_ks is not None else default_sample_ks(view, eps)
            r = max(abs(formal_residual(spec, view, eps, k, high=high)) for k in ks)
            maxres.append(r)
        maxres = np.array(maxres)
        if maxres.max() < 1e-13 * scale:
            fits[s] = OrderFit(s, None, None, eps_list, maxres, exact=True)
            continue
        slope, logc = np.polyfit(np.log(eps_list), np.log(maxres), 1)
        fits[s] = OrderFit(s, float(slope), float(np.exp(logc)), eps_list, maxres)
    return fits
