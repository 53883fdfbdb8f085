"""Difference schemes whose roots cluster at 1: regular power-series solutions.

When every root of the full characteristic polynomial satisfies
lambda_m(x, eps) = 1 + eps^q (Q_m(x) + o(eps)), solutions carry plain power
series y_k ~ sum_m eps^m Xi_m(k eps). The Xi hierarchy is generated by
direct eps-expansion of the scheme itself (Taylor in the step offsets), each
level solving a linear second-order ODE by spectral collocation; the
derivative towers of each level come from differentiating its own ODE, so
sources for later levels stay accurate to rounding.
"""

import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import cheb
from .errors import (
    DegeneracyMismatch,
    InsufficientDecades,
    OrderOverflow,
    SeparationFailure,
)
from .fields import ScalarField
from .roots import char_roots_at
from .series import TaylorSeries


def check_degeneracy(spec, eps_list, samples=48, sep_tol=1e-8):
    """Common integer clustering rate q and profiles Q_m = (lambda_m - 1)/eps^q.

    Root branches of the full polynomial are matched across the eps_list by
    nearest-neighbour continuation in eps. Raises DegeneracyMismatch when
    roots do not converge to 1 at a common integer rate, SeparationFailure
    when the (signed, complex) profiles are not separated from each other
    and from zero.
    """
    eps_list = sorted(eps_list, reverse=True)
    if len(eps_list) < 2:
        raise ValueError("need at least two eps values")
    lo, hi = spec.interval
    xs = np.linspace(lo, hi, samples)
    rows = np.empty((len(eps_list), samples, spec.l), dtype=complex)
    for e_i, eps in enumerate(eps_list):
        for x_i, x in enumerate(xs):
            roots = char_roots_at(spec, x, eps, use_full=True)
            if e_i == 0:
                rows[0, x_i] = np.sort_complex(roots)
            else:
                prev = rows[e_i - 1, x_i]
                cost = np.abs(prev[:, None] - roots[None, :])
                _, cols = linear_sum_assignment(cost)
                rows[e_i, x_i] = roots[cols]
    dist = np.abs(rows - 1.0)
    if dist[-1].max() > 0.5:
        raise DegeneracyMismatch(
            f"some root stays {dist[-1].max():.3g} away from 1 at eps={eps_list[-1]:g}"
        )
    with np.errstate(divide="ignore"):
        slopes = (np.log(dist[-1]) - np.log(dist[0])) / (
            math.log(eps_list[-1]) - math.log(eps_list[0])
        )
    q_fit = float(np.median(slopes))
    q = int(round(q_fit))
    if abs(q_fit - q) > 0.15 or q < 1 or np.abs(slopes - q_fit).max() > 0.3:
        raise DegeneracyMismatch(
            f"clustering exponents {slopes.min():.2f}..{slopes.max():.2f} "
            f"not a common integer (fit {q_fit:.3f})"
        )
    # profiles, linearly extrapolated to eps -> 0 from the two smallest eps
    e1, e2 = eps_list[-2], eps_list[-1]
    f1 = (rows[-2] - 1.0) / e1**q
    f2 = (rows[-1] - 1.0) / e2**q
    prof = (e1 * f2 - e2 * f1) / (e1 - e2)
    scale = np.abs(prof).max()
    for x_i in range(samples):
        p = prof[x_i]
        if np.abs(p).min() < sep_tol * scale:
            raise SeparationFailure(f"Q_m vanishes near x = {xs[x_i]:.6g}")
        gaps = np.abs(p[:, None] - p[None, :]) + np.eye(spec.l) * scale
        if gaps.min() < sep_tol * scale:
            raise SeparationFailure(f"Q_m not separated near x = {xs[x_i]:.6g}")
    q_fields = [
        ScalarField.from_function(
            lambda x, m=m: np.interp(np.real(x), xs, prof[:, m].real)
            + 1j * np.interp(np.real(x), xs, prof[:, m].imag),
            spec.interval,
            n=samples,
            adapt=False,
        )
        for m in range(spec.l)
    ]
    return q, q_fields


class SchemeSeries:
    """Power-series solution levels Xi_0..Xi_S of a degenerate scheme."""

    def __init__(self, spec, xis, towers, q, cauchy):
        self.scheme = spec
        self.xis = xis          # list of ScalarField
        self._towers = towers   # list of TaylorSeries over the grid nodes
        self.q = q
        self.init = cauchy

    @property
    def order(self):
        return len(self.xis) - 1

    def partial_sum(self, x, eps, s=None):
        s = self.order if s is None else s
        total = np.zeros(np.shape(x), dtype=complex)
        for m in range(s + 1):
            total = total + self.xis[m](x) * eps**m
        return total


def _coeff_towers_at(spec, nodes, order):
    out = []
    for j in range(spec.l + 1):
        per = []
        for s in range(spec.coeffs[j].order + 1):
            per.append(spec.coeffs[j].taylor_term(s, nodes, order))
        out.append(per)
    return out


def xi_series(spec, order, cauchy=(0.0, 1.0), grid_n=48, march_steps=192,
              tower_order=None):
    """Solve the power-series hierarchy of a degenerate scheme.

    Level m solves  alpha Xi_m'' + beta Xi_m' + gamma Xi_m = source from
    levels < m, with Xi_0(0) = cauchy[0], Xi_0'(0) = cauchy[1] and the
    higher initial conditions induced by y_0 = c0, y_1 = c0 + eps*c1.
    The equations come from collecting eps powers of
    sum_j a_j(x, eps) Xi(x + j*eps), so no transcribed formula enters.

    Each level is integrated by Taylor marching on a uniform grid (the
    local Taylor coefficients follow from the ODE itself), which keeps the
    solution and all the derivative towers needed by later levels accurate
    to rounding; a spectral collocation solve would cap the accuracy near
    1e-9 and bury the eps^4-order error measurements.
    """
    lo, hi = spec.interval
    l = spec.l
    U0 = (order + 12) if tower_order is None else tower_order
    M = march_steps
    us = np.linspace(lo, hi, M + 1)
    h = (hi - lo) / M
    A = _coeff_towers_at(spec, us, U0 + 2)

    def op_piece(s, r, upto):
        tot = TaylorSeries.constant(0.0, upto, (M + 1,))
        for j in range(l + 1):
            if s > spec.coeffs[j].order:
                continue
            w = (j**r) / math.factorial(r)
            tot = tot + TaylorSeries(A[j][s].truncate(upto).c * w)
        return tot

    alpha = op_piece(0, 2, U0)
    beta = op_piece(1, 1, U0)
    gamma = op_piece(2, 0, U0)
    scale = max(np.abs(A[j][0].c[0]).max() for j in range(l + 1))
    z0 = np.abs(op_piece(0, 0, 0).c[0]).max()
    z1 = max(np.abs(op_piece(0, 1, 0).c[0]).max(), np.abs(op_piece(1, 0, 0).c[0]).max())
    if z0 > 1e-9 * scale or z1 > 1e-9 * scale:
        raise DegeneracyMismatch(
            "scheme is not degenerate to the order the power-series ansatz needs"
        )
    if np.abs(alpha.c[0]).min() < 1e-12 * scale:
        raise DegeneracyMismatch("second-order operator coefficient vanishes")

    def xi_deriv_tower(tow, r, upto):
        """Columnwise tower of Xi^(r) from the tower of Xi."""
        if r == 0:
            return tow.truncate(upto)
        if r > tow.order:
            return None
        sh = tow.shift_tail(r)
        return TaylorSeries(sh.c[: upto + 1] * math.factorial(r))

    towers = []  # per level: TaylorSeries over march columns
    xis = []

    for m in range(order + 1):
        U = U0 - m
        src = TaylorSeries.constant(0.0, max(U - 2, 0), (M + 1,))
        for mp in range(m):
            for j in range(l + 1):
                for s in range(spec.coeffs[j].order + 1):
                    r = m + 2 - mp - s
                    if r < 0:
                        continue
                    xt = xi_deriv_tower(towers[mp], r, max(U - 2, 0))
                    if xt is None:
                        continue
                    if xt.order < max(U - 2, 0):
                        raise OrderOverflow(
                            f"level {m} source needs Xi_{mp}^({r}) beyond the "
                            "tower budget; raise tower_order"
                        )
                    w = (j**r) / math.factorial(r)
                    src = src + TaylorSeries(
                        (A[j][s].truncate(max(U - 2, 0)) * xt).c * w
                    )

        if m == 0:
            v, d = complex(cauchy[0]), complex(cauchy[1])
        else:
            v = 0.0
            d = 0.0
            # order eps^(m+1) of y_1 = c0 + eps*c1: sum_r Xi_(m+1-r)^(r)(0)/r! = 0
            for r in range(2, m + 2):
                d -= complex(towers[m + 1 - r].c[r][0])

        colA = alpha.c[:, :]
        colB = beta.c[:, :]
        colG = gamma.c[:, :]
        colS = src.c[:, :]
        tow_c = np.zeros((U + 1, M + 1), dtype=complex)
        for i in range(M + 1):
            c = _column_taylor(
                colA[:, i], colB[:, i], colG[:, i], colS[:, i], v, d, U
            )
            tow_c[:, i] = c
            if i < M:
                v = _poly_eval(c, h)
                d = _poly_eval_deriv(c, h)
        tow = TaylorSeries(tow_c)
        towers.append(tow)

        nodes = cheb.lobatto_nodes(grid_n, lo, hi)
        idx = np.clip(np.round((nodes - lo) / h).astype(int), 0, M)
        deltas = nodes - us[idx]
        vals = np.array(
            [_poly_eval(tow_c[:, ii], dd) for ii, dd in zip(idx, deltas)]
        )
        xi_field = ScalarField.from_values(
            spec.interval, vals, jet_fn=_march_jet_fn(us, h, tow_c)
        )
        xis.append(xi_field)
    return SchemeSeries(spec, xis, towers, q=None, cauchy=tuple(cauchy))


def _poly_eval(c, t):
    out = 0.0 + 0.0j
    for q in range(len(c) - 1, -1, -1):
        out = out * t + c[q]
    return out


def _poly_eval_deriv(c, t):
    out = 0.0 + 0.0j
    for q in range(len(c) - 1, 0, -1):
        out = out * t + q * c[q]
    return out


def _column_taylor(a, b, g, s, v, d, U):
    """Taylor coefficients of the ODE solution at one march point.

    Solves alpha Xi'' + beta Xi' + gamma Xi + src = 0 order by order from
    Xi(x0) = v, Xi'(x0) = d; a, b, g, s are the local coefficient towers.
    """
    c = np.zeros(U + 1, dtype=complex)
    c[0] = v
    if U >= 1:
        c[1] = d
    for r in range(2, U + 1):
        m = r - 2
        acc = s[m] if m < len(s) else 0.0
        for a_i in range(1, m + 1):
            if a_i < len(a):
                acc += a[a_i] * (r - a_i) * (r - a_i - 1) * c[r - a_i]
        for a_i in range(0, m + 1):
            if a_i < len(b):
                acc += b[a_i] * (m + 1 - a_i) * c[m + 1 - a_i]
            if a_i < len(g):
                acc += g[a_i] * c[m - a_i]
        c[r] = -acc / (a[0] * r * (r - 1))
    return c


def _march_jet_fn(us, h, tow_c):
    def jet_fn(x0, order):
        x0a = np.atleast_1d(np.asarray(x0, dtype=float))
        idx = np.clip(np.round((x0a - us[0]) / h).astype(int), 0, len(us) - 1)
        deltas = x0a - us[idx]
        out = np.zeros((order + 1, len(x0a)), dtype=complex)
        U = tow_c.shape[0] - 1
        for p, (ii, dd) in enumerate(zip(idx, deltas)):
            col = tow_c[:, ii]
            for r in range(min(order, U) + 1):
                # Xi^(r)(x0)/r! by recentring the column tower
                acc = 0.0 + 0.0j
                for q in range(U, r - 1, -1):
                    acc = acc * dd + col[q] * math.comb(q, r)
                out[r, p] = acc
        res = TaylorSeries(out)
        if np.ndim(x0) == 0:
            res = TaylorSeries(out[:, 0])
        return res

    return jet_fn


def local_condition_residual(series, eps, samples=64):
    """max_x |sum_j a_j(x, eps) Gamma_s(x + j eps, eps)| for the full sum."""
    spec = series.scheme
    lo, hi = spec.interval
    xs = np.linspace(lo, hi - spec.l * eps, samples)
    total = np.zeros_like(xs, dtype=complex)
    for j in range(spec.l + 1):
        aj = np.array([complex(spec.coeff_value(j, x, eps)) for x in xs])
        total += aj * series.partial_sum(xs + j * eps, eps)
    return float(np.abs(total).max())


def scheme_error_order(spec, series, eps_list, x_window=None):
    """Slope of log max|y_k - Gamma_s(k eps)| vs log eps, per truncation s."""
    from .exact import iterate

    eps_list = sorted(eps_list, reverse=True)
    if len(eps_list) < 3 or eps_list[0] / eps_list[-1] < 5.0:
        raise InsufficientDecades("need >= 3 eps values spanning a factor >= 5")
    lo, hi = spec.interval
    c0, c1 = series.init
    out = {}
    errs_by_s = {s: [] for s in range(series.order + 1)}
    for eps in eps_list:
        k_hi = int(math.floor(hi / eps + 1e-9))
        init = [c0, c0 + eps * c1]
        if spec.l != 2:
            raise OrderOverflow("error-order harness supports two-step schemes")
        traj = iterate(spec, eps, init, (0, k_hi))
        ks = traj.ks
        xs = ks * eps
        if x_window is not None:
            mask = (xs >= x_window[0]) & (xs <= x_window[1])
            ks, xs = ks[mask], xs[mask]
        vals = np.array([traj.value(k) for k in ks])
        for s in range(series.order + 1):
            approx = series.partial_sum(xs, eps, s=s)
            errs_by_s[s].append(np.abs(vals - approx).max())
    for s, errs in errs_by_s.items():
        slope = float(np.polyfit(np.log(eps_list), np.log(errs), 1)[0])
        out[s] = (slope, np.array(errs))
    return out


def richardson_eps2_coefficient(spec, series, eps_list, xs):
    """Independent estimate of the eps^2 coefficient by extrapolation.

    Computes (y_k(eps) - Xi_0(k eps)) / eps^2 on a shared abscissa set and
    eliminates the eps^2-step corrections of the remainder by polynomial
    extrapolation in eps^2 across the given eps values.
    """
    from .exact import iterate

    eps_list = sorted(eps_list, reverse=True)
    c0, c1 = series.init
    lo, hi = spec.interval
    samples = []
    for eps in eps_list:
        k_hi = int(math.floor(hi / eps + 1e-9))
        traj = iterate(spec, eps, [c0, c0 + eps * c1], (0, k_hi))
        ks = np.array([int(round(x / eps)) for x in xs])
        if np.abs(ks * eps - xs).max() > 1e-12:
            raise ValueError("xs must be integer multiples of every eps")
        vals = np.array([traj.value(k) for k in ks])
        samples.append((vals - series.partial_sum(xs, eps, s=0)) / eps**2)
    # Neville extrapolation in eps^2 to 0
    t = [e**2 for e in eps_list]
    table = list(samples)
    m = len(table)
    for level in range(1, m):
        new = []
        for i in range(m - level):
            num = t[i] * table[i + 1] - t[i + level] * table[i]
            new.append(num / (t[i] - t[i + level]))
        table = new
    return table[0]
