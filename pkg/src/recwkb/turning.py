"""Airy-type analysis at a generic root crossing.

Near a crossing x* with gap ~ sqrt|x - x*| the natural variables are
delta = eps^(1/3) and xi = (k - x*/eps) * delta. Substituting
y ~ sum_t delta^t chi_t(xi) into the recurrence and collecting delta powers
gives chi_0'' = kappa xi chi_0 and an inhomogeneous Airy hierarchy above it,
with kappa = -2 sum_j d/dx[a_j lam*^j] / sum_j a_j lam*^j j^2 at (x*, 0).

The quoted connection constant Theta reported by theta() keeps the
conventional normalization Theta^3 = sum_j D_x a_j / sum_j a_j j^2; the
dynamically correct Airy argument scale is airy_scale = (-2 Theta^3)^(1/3),
and every computed profile uses it (the two differ by the factor -2; only
the latter reproduces the recurrence and the recessive solution).

Interior profiles live on a uniform xi grid with a full Taylor tower per
node: pointwise-relative accuracy survives the exp((2/3)|Theta xi|^(3/2))
dynamic range, which a single global interpolant would not.
"""

import math

import numpy as np
from scipy.special import airy as _scipy_airy

from .errors import (
    DegenerateTheta,
    IllConditionedFit,
    NonGenericCrossing,
    OutOfRange,
    WindowEmpty,
)
from .roots import char_roots_at
from .series import TaylorSeries

AIRY_RANGE = 30.0


def airy_eval(z):
    """(Ai, Bi, Ai', Bi') at real or complex z, |z| <= 30."""
    if np.max(np.abs(z)) > AIRY_RANGE:
        raise OutOfRange(f"|z| > {AIRY_RANGE} outside the evaluation envelope")
    ai, aip, bi, bip = _scipy_airy(z)
    return ai, bi, aip, bip


def theta(spec, x_star, tol=1e-9):
    """Connection constant of the crossing at x_star.

    Returns a complex Theta with Theta^3 = num/den, where
    num = sum_j D_x[a_j lam*^j](x*, 0) and den = sum_j a_j(x*, 0) lam*^j j^2
    (lam* is the double-root value; the rescaling y -> lam*^-k y reduces to
    the lam* = 1 normalization). All three cube roots are recorded on the
    result's .roots attribute; .airy_scale is the profile scale.
    """
    roots = char_roots_at(spec, x_star, polish=False)
    gaps = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(gaps, np.inf)
    i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
    cluster = 0.5 * (roots[i] + roots[j])
    # at a double root the derivative polynomial has a simple root there,
    # which pins lam* far more accurately than the root cluster itself
    a0 = np.array(
        [complex(spec.coeffs[jj].terms[0](x_star)) for jj in range(spec.l + 1)]
    )
    dpoly = np.polynomial.polynomial.polyder(a0)
    lam_star = cluster
    if spec.l >= 2:
        droots = np.roots(dpoly[::-1])
        lam_star = droots[np.argmin(np.abs(droots - cluster))]
    num = 0.0 + 0.0j
    den = 0.0 + 0.0j
    scale = 0.0
    for jj in range(spec.l + 1):
        t0 = spec.coeffs[jj].taylor_term(0, np.array([x_star]), 1)
        a_val = complex(t0.c[0][0])
        a_der = complex(t0.c[1][0])
        num += a_der * lam_star**jj
        den += a_val * lam_star**jj * jj**2
        scale = max(scale, abs(a_val))
    if abs(den) < tol * scale or abs(num) < tol * scale:
        raise DegenerateTheta(
            f"theta undefined: |num| = {abs(num):.2e}, |den| = {abs(den):.2e}"
        )
    t3 = num / den
    theta_val = _select_cuberoot(t3)
    theta_val = complex(theta_val)
    out = _Theta(theta_val)
    out.theta3 = complex(t3)
    out.roots = tuple(
        theta_val * np.exp(2j * np.pi * m / 3) for m in range(3)
    )
    out.kappa = complex(-2.0 * t3)
    out.airy_scale = _select_cuberoot(out.kappa)
    out.lam_star = complex(lam_star)
    return out


class _Theta(complex):
    """Complex Theta carrying the cube roots and the profile scale."""


def _select_cuberoot(w):
    """Real root matching sign(w) when w is real; principal third otherwise."""
    w = complex(w)
    if abs(w.imag) < 1e-10 * max(abs(w), 1.0):
        r = abs(w.real) ** (1.0 / 3.0)
        return complex(r if w.real >= 0 else -r)
    return complex(w ** (1.0 / 3.0))


# ---------------------------------------------------------------------------
# tower-backed interior profiles


class TowerField:
    """Function on a uniform grid with a Taylor tower at every node.

    Evaluation recentres the nearest node's tower, so relative accuracy is
    pointwise even across exponentially large dynamic range.
    """

    def __init__(self, grid, towers):
        self.grid = np.asarray(grid, dtype=float)
        self.towers = np.asarray(towers, dtype=complex)  # (U+1, n)
        self.h = self.grid[1] - self.grid[0]

    @property
    def values(self):
        return self.towers[0]

    @property
    def interval(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.clip(np.round((x - self.grid[0]) / self.h).astype(int),
                      0, len(self.grid) - 1)
        d = x - self.grid[idx]
        out = np.zeros(len(x), dtype=complex)
        U = self.towers.shape[0] - 1
        for q in range(U, -1, -1):
            out = out * d + self.towers[q, idx]
        return out if out.size > 1 else complex(out[0])

    def derivative_values(self, r=1):
        """Node values of the r-th derivative from the towers."""
        if r >= self.towers.shape[0]:
            raise ValueError("tower too short for this derivative order")
        return self.towers[r] * math.factorial(r)

    def deriv_tower(self, r, upto):
        """Tower of the r-th derivative (Taylor-normalized), as TaylorSeries."""
        t = TaylorSeries(self.towers)
        sh = t.shift_tail(r)
        return TaylorSeries(sh.c[: upto + 1] * math.factorial(r))


def _ode_tower_columns(kappa, xi, src_t, v, d, U):
    """Towers of f with f'' = kappa (xi + h) f + src at every grid node.

    src_t: TaylorSeries over columns (or None); v, d: value and derivative
    rows. Vectorized in the node axis.
    """
    n = len(xi)
    c = np.zeros((U + 1, n), dtype=complex)
    c[0] = v
    if U >= 1:
        c[1] = d
    for r in range(2, U + 1):
        m = r - 2
        acc = np.zeros(n, dtype=complex)
        if src_t is not None and m <= src_t.order:
            acc += src_t.c[m]
        acc += kappa * xi * c[m]
        if m >= 1:
            acc += kappa * c[m - 1]
        c[r] = acc / (r * (r - 1))
    return c


def _airy_flavor_towers(flavor, theta_a, kappa, xi, U):
    """Towers of Ai(theta xi) + flavor * i * Bi(theta xi); flavor in {1, 0, -1}.

    flavor 0 gives the pure Ai profile (the decaying direction).
    """
    z = theta_a * xi
    if np.max(np.abs(z)) > AIRY_RANGE:
        raise OutOfRange("xi grid exceeds the Airy evaluation envelope")
    ai, aip, bi, bip = _scipy_airy(z)
    if flavor == 0:
        v = ai
        d = theta_a * aip
    else:
        v = ai + 1j * flavor * bi
        d = theta_a * (aip + 1j * flavor * bip)
    return _ode_tower_columns(kappa, xi, None, v, d, U)


def _tower_product(ta, tb, upto):
    return (TaylorSeries(ta[: upto + 1]) * TaylorSeries(tb[: upto + 1])).c


def _cumulative_from_towers(grid, towers, base_index, reverse=False):
    """Cumulative integral values at the nodes via per-step tower quadrature."""
    h = grid[1] - grid[0]
    U = towers.shape[0] - 1
    # integral over [x_i, x_i+1] of the local expansion at node i
    q = np.arange(U + 1)
    step = np.sum(towers * (h ** (q + 1) / (q + 1))[:, None], axis=0)
    out = np.zeros(len(grid), dtype=complex)
    out[1:] = np.cumsum(step[:-1])
    out -= out[base_index]
    return out


def _poly_towers(coeffs, xi, upto):
    """Towers of a polynomial sum_p coeffs[p] xi^p at every node."""
    n = len(xi)
    c = np.zeros((upto + 1, n), dtype=complex)
    for p, cp in enumerate(coeffs):
        if cp == 0:
            continue
        for a in range(min(p, upto) + 1):
            c[a] += cp * math.comb(p, a) * xi ** (p - a)
    return c


def coefficient_polys(spec, x_star, sigma_max, lam_star=1.0):
    """Polynomials P_{j, sigma}(xi) of the rescaled coefficient expansion.

    a_j(x* + xi delta^2, delta^3) * lam*^j = sum_sigma P_{j, sigma}(xi) delta^sigma
    with P carrying the lam*^j normalization factor. Returns
    {(j, sigma): coefficient array in xi}.
    """
    out = {}
    pmax = sigma_max // 2 + 1
    for j in range(spec.l + 1):
        towers = {}
        for s in range(spec.coeffs[j].order + 1):
            towers[s] = spec.coeffs[j].taylor_term(s, np.array([x_star]), pmax).c[:, 0]
        for sigma in range(sigma_max + 1):
            poly = np.zeros(sigma // 2 + 1, dtype=complex)
            for q in range(sigma // 3 + 1):
                rem = sigma - 3 * q
                if rem % 2:
                    continue
                p = rem // 2
                if q in towers and p < len(towers[q]):
                    poly[p] += towers[q][p] * lam_star**j
            out[(j, sigma)] = poly
    return out


class TurningPointExpansion:
    """Interior expansion data at one crossing."""

    def __init__(self, x_star, pair, theta_val, chis, flavor,
                 particular=None, xi_grid=None, kappa=None, airy_scale=None,
                 polys=None):
        self.x_star = x_star
        self.pair = pair
        self.theta = theta_val
        self.chis = chis                      # TowerField per order
        self.branch_flavor = flavor           # "plus" or "minus"
        self.particular_airy = particular     # TowerField list or None
        self.xi_grid = xi_grid
        self.kappa = kappa
        self.airy_scale = airy_scale
        self.polys = polys

    @property
    def S(self):
        return len(self.chis) - 1

    def flavor_values(self, xi, eps, order=None):
        """sum_t delta^t chi_t(xi) for this flavor."""
        order = self.S if order is None else order
        delta = eps ** (1.0 / 3.0)
        total = np.zeros(np.shape(xi), dtype=complex)
        for t in range(order + 1):
            total = total + self.chis[t](xi) * delta**t
        return total

    def particular_values(self, xi, eps, order=None):
        if self.particular_airy is None:
            raise ValueError("particular solution not computed")
        avail = len(self.particular_airy) - 1
        order = avail if order is None else min(order, avail)
        delta = eps ** (1.0 / 3.0)
        total = np.zeros(np.shape(xi), dtype=complex)
        for t in range(order + 1):
            total = total + self.particular_airy[t](xi) * delta**t
        return total


def interior_expansion(spec, crossing, order, xi_max=12.0, grid_points=601,
                       flavor="plus", tower_extra=8, with_particular=True):
    """Airy hierarchy chi_0..chi_order at a generic crossing.

    chi_0 = Ai(theta_A xi) + i Bi(theta_A xi) (flavor plus; minus conjugates
    the Bi part); each later level solves chi'' - kappa xi chi = R with R
    assembled from the coefficient polynomials and the lower levels'
    derivative towers, normalized by chi(0) = chi'(0) = 0. The particular
    (decaying) family repeats the hierarchy on top of pure Ai with the
    bounded-at-+inf quadrature rule.
    """
    if getattr(crossing, "exponent", 0.5) is not None and abs(
        getattr(crossing, "exponent", 0.5) - 0.5
    ) > 0.1:
        raise NonGenericCrossing(
            "interior expansion requires a sqrt-type crossing",
            exponent=getattr(crossing, "exponent", None),
        )
    x_star = crossing.x_star
    th = theta(spec, x_star)
    kappa = th.kappa
    theta_a = th.airy_scale
    sign = 1 if flavor == "plus" else -1
    xi = np.linspace(-xi_max, xi_max, grid_points)
    i0 = int(np.argmin(np.abs(xi)))
    xi -= xi[i0]  # put a node exactly at xi = 0
    den = sum(
        complex(spec.coeffs[j].terms[0](x_star)) * th.lam_star**j * j * j
        for j in range(spec.l + 1)
    )
    polys = coefficient_polys(spec, x_star, 3 * (order + 2), lam_star=th.lam_star)

    def run_hierarchy(flavor_sign):
        U0 = order + 2 + tower_extra
        levels = []
        for s in range(order + 1):
            U = U0 - s
            if s == 0:
                tow = _airy_flavor_towers(flavor_sign, theta_a, kappa, xi, U)
                levels.append(TowerField(xi, tow))
                continue
            src = _interior_source(spec, polys, levels, s, xi, U - 2, den)
            chi = _solve_inhom(
                kappa, theta_a, xi, i0, src, U,
                decay_right=(flavor_sign == 0),
            )
            levels.append(chi)
        return levels

    chis = run_hierarchy(sign)
    particular = run_hierarchy(0) if with_particular else None
    if np.abs(chis[0].values).min() <= 0:
        raise DegenerateTheta("leading flavor profile vanishes on the grid")
    return TurningPointExpansion(
        x_star, crossing.pair, th, chis, flavor,
        particular=particular, xi_grid=xi, kappa=kappa, airy_scale=theta_a,
        polys=polys,
    )


def _interior_source(spec, polys, levels, s, xi, upto, den):
    """Tower source R_s = -(2/den) * sum of lower-level contributions."""
    upto = max(upto, 0)
    n = len(xi)
    acc = np.zeros((upto + 1, n), dtype=complex)
    for m in range(s):
        lvl = levels[m]
        for j in range(spec.l + 1):
            for sigma in range(0, s + 2 - m + 1):
                r = s + 2 - m - sigma
                if r < 0:
                    continue
                poly = polys.get((j, sigma))
                if poly is None or not np.any(poly):
                    continue
                dt = lvl.deriv_tower(r, upto)
                pt = _poly_towers(poly, xi, upto)
                w = (j**r) / math.factorial(r)
                acc += w * _tower_product(pt, dt.c, upto)
    return TaylorSeries(-2.0 / den * acc)


def _solve_inhom(kappa, theta_a, xi, i0, src, U, decay_right=False):
    """Particular solution of chi'' - kappa xi chi = src via Airy quadrature."""
    z = theta_a * xi
    ai, aip, bi, bip = _scipy_airy(z)
    ai_tow = _ode_tower_columns(kappa, xi, None, ai, theta_a * aip, U + 2)
    bi_tow = _ode_tower_columns(kappa, xi, None, bi, theta_a * bip, U + 2)
    r_ai = _tower_product(src.c, ai_tow, min(U + 1, src.order + 1))
    r_bi = _tower_product(src.c, bi_tow, min(U + 1, src.order + 1))
    base_a = len(xi) - 1 if decay_right else i0
    IA = _cumulative_from_towers(xi, r_ai, base_a)
    IB = _cumulative_from_towers(xi, r_bi, i0)
    pref = np.pi / theta_a
    vals = pref * (bi * IA - ai * IB)
    ders = np.pi * (bip * IA - aip * IB)
    towers = _ode_tower_columns(kappa, xi, src, vals, ders, U)
    return TowerField(xi, towers)


def inhom_airy_solve(R, theta_val, bc="zero_at_origin"):
    """Solve f'' - theta^3 xi f = R on R's grid; returns a TowerField.

    bc "zero_at_origin": f(0) = f'(0) = 0; "decay_right": the growing
    homogeneous component is removed at the right edge.
    """
    if hasattr(R, "grid"):
        grid = np.asarray(R.grid, dtype=float)
        vals = np.asarray(R.values, dtype=complex)
    else:
        grid, vals = R
        grid = np.asarray(grid, dtype=float)
        vals = np.asarray(vals, dtype=complex)
    if not np.allclose(np.diff(grid), grid[1] - grid[0], rtol=1e-9):
        raise ValueError("R must live on a uniform grid")
    theta_a = complex(theta_val)
    kappa = theta_a**3
    i0 = int(np.argmin(np.abs(grid)))
    U = 10
    if hasattr(R, "towers"):
        src = TaylorSeries(R.towers[: U + 1])
    else:
        # towers of R from finite differences are too lossy; require the
        # caller to supply smooth data and build towers from the ODE of
        # a spline-free local fit: fall back to a polynomial fit window
        src = TaylorSeries(_local_towers(grid, vals, U))
    return _solve_inhom(kappa, theta_a, grid, i0, src, U,
                        decay_right=(bc == "decay_right"))


def _local_towers(grid, vals, U, stencil=13):
    """Local-polynomial towers of sampled data (for caller-supplied R)."""
    n = len(grid)
    h = grid[1] - grid[0]
    half = stencil // 2
    out = np.zeros((U + 1, n), dtype=complex)
    for i in range(n):
        a = max(0, min(i - half, n - stencil))
        window = slice(a, a + stencil)
        d = grid[window] - grid[i]
        V = np.vander(d, min(U + 1, stencil), increasing=True)
        coef, *_ = np.linalg.lstsq(V, vals[window], rcond=None)
        out[: len(coef), i] = coef
    return out


# ---------------------------------------------------------------------------
# the decaying solution and the matching


def airy_particular_solution(spec, tp, eps, k_range=None, order=None):
    """Predicted decaying sequence y_k ~ Ai-profile, normalized to 1 at k=0.

    Returns (ks, values) over |k| <= eps^(-0.60) by default (clipped to the
    stored xi range).
    """
    delta = eps ** (1.0 / 3.0)
    xi_cap = tp.xi_grid.max()
    k_cap = int(min(eps ** (-0.60), xi_cap / delta))
    if k_range is None:
        ks = np.arange(-k_cap, k_cap + 1)
    else:
        ks = np.arange(k_range[0], k_range[1] + 1)
    xi = ks * delta
    vals = tp.particular_values(xi, eps, order=order)
    norm = tp.particular_values(np.array([0.0]), eps, order=order)[0]
    return ks, vals / norm


class ConnectionData:
    def __init__(self, side, fit, window_ks, interior_fit=None):
        self.side = side
        self.fit = fit
        self.coefficients = fit.coeffs
        self.overlap_window = window_ks
        self.fit_residual = fit.residual
        self.interior_fit = interior_fit

    def __repr__(self):
        mags = [f"{abs(c):.3e}" for c in self.coefficients]
        return (
            f"ConnectionData(side={self.side}, |C|={mags}, "
            f"resid={self.fit_residual:.2e})"
        )


def overlap_window_ks(eps, beta_ext=0.45, alpha_int=0.60, side="right"):
    """Integer steps in the overlap eps^-beta <= |k| <= eps^-alpha."""
    k_in = int(math.ceil(eps**-beta_ext))
    k_out = int(math.floor(eps**-alpha_int))
    if k_in >= k_out:
        raise WindowEmpty(
            f"no integer steps in [eps^-{beta_ext}, eps^-{alpha_int}] at eps={eps:g}"
        )
    ks = np.arange(k_in, k_out + 1)
    return ks if side == "right" else -ks[::-1]


class BasisFit:
    """Result of a rescaled least-squares fit in an exponential basis.

    coeffs: coefficients under unit-column normalization (window relative
    weights). log_coeffs: complex logs of the coefficients in the raw
    exp(L_m) basis, relative to the target normalized so its largest
    magnitude is 1; these are window-convention independent and can be
    compared between subwindows by difference.
    """

    def __init__(self, coeffs, log_coeffs, residual, cond, contamination):
        self.coeffs = coeffs
        self.log_coeffs = log_coeffs
        self.residual = residual
        self.cond = cond
        self.contamination = contamination


def fit_in_basis(log_basis_fns, target_logmag, target_dir, ks):
    """Least squares of a log-scaled trajectory in an exponential basis."""
    target_logmag = np.asarray(target_logmag, dtype=float)
    # the trajectory's overall normalization is arbitrary; rebase so the
    # exponentials below stay representable (absorbed into the coefficients)
    tshift = target_logmag.max()
    lm = target_logmag - tshift
    B = np.empty((len(ks), len(log_basis_fns)), dtype=complex)
    logs = np.empty((len(ks), len(log_basis_fns)))
    for c, fn in enumerate(log_basis_fns):
        for r, k in enumerate(ks):
            L = fn(k)
            logs[r, c] = L.real
            B[r, c] = L
    ref = np.maximum(logs.max(axis=1), lm)
    rawB = B.copy()
    for c in range(B.shape[1]):
        B[:, c] = np.exp(B[:, c] - ref)
    rhs = np.exp(lm - ref) * np.asarray(target_dir)
    norms = np.linalg.norm(B, axis=0)
    if not np.all(norms > 0):
        raise IllConditionedFit("a basis column underflowed on the window")
    Bn = B / norms
    cond = np.linalg.cond(Bn)
    if not np.isfinite(cond) or cond > 1e10:
        raise IllConditionedFit(f"basis condition number {cond:.2e}")
    sol, *_ = np.linalg.lstsq(Bn, rhs, rcond=None)
    resid = np.linalg.norm(Bn @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300)
    # window-independent logs: target ~ sum_m exp(logC_m + L_m(k))
    log_coeffs = []
    for c in range(B.shape[1]):
        if sol[c] == 0:
            log_coeffs.append(complex(-np.inf))
        else:
            log_coeffs.append(complex(np.log(sol[c] / norms[c])) + tshift)
    # max over the window of each component's magnitude relative to the fit
    contamination = []
    fitted = np.abs(Bn @ sol)
    fitted[fitted == 0] = 1e-300
    for c in range(B.shape[1]):
        contamination.append(float(np.max(np.abs(sol[c] * Bn[:, c]) / fitted)))
    return BasisFit(sol, np.array(log_coeffs), float(resid), float(cond),
                    np.array(contamination))


def match_connection(exterior_pair, interior, eps, window=(0.45, 0.60),
                     side="right", trajectory=None, spec=None):
    """Connection coefficients of the recessive solution on one side.

    exterior_pair: PhiExpansion objects (one per crossing branch) valid on
    the side's overlap abscissae. The oracle trajectory (backward-selected
    recessive solution) is fitted in the exterior basis over the overlap
    window; coefficients are reported under unit-column normalization so
    their moduli compare directly. The same window is also fitted in the
    interior flavor basis.
    """
    beta_ext, alpha_int = window
    ks_rel = overlap_window_ks(eps, beta_ext, alpha_int, side=side)
    if spec is None:
        spec = exterior_pair[0].spec
    k_star = interior.x_star / eps
    ks_abs = np.round(ks_rel + k_star).astype(int)
    if trajectory is None:
        raise ValueError("pass the recessive oracle trajectory")
    lm = []
    dirs = []
    for k in ks_abs:
        a, b = trajectory.log_value(k)
        lm.append(a)
        dirs.append(b)

    def log_fn(phi):
        def fn(k):
            x = k * eps
            return complex(phi.exponent_sum(x, eps) / eps)

        return fn

    ext_fns = [log_fn(p) for p in exterior_pair]
    fit = fit_in_basis(ext_fns, lm, dirs, ks_abs)

    delta = eps ** (1.0 / 3.0)

    def interior_fn(flavor_sign):
        def fn(k):
            xi = (k - k_star) * delta
            if flavor_sign == 0:
                v = interior.particular_values(np.array([xi]), eps)[0]
            else:
                v = _flavor_value(interior, xi, eps, flavor_sign)
            return complex(np.log(v))

        return fn

    # on the decaying side the flavor pair is numerically degenerate (both
    # Bi-dominated); pair the particular profile with one flavor instead
    signs = (0, +1) if side == "right" else (+1, -1)
    ifit = None
    try:
        ifit = fit_in_basis([interior_fn(s) for s in signs], lm, dirs, ks_abs)
    except (IllConditionedFit, FloatingPointError):
        pass
    return ConnectionData(side, fit, (int(ks_abs[0]), int(ks_abs[-1])),
                          interior_fit=ifit)


def _flavor_value(tp, xi, eps, sign):
    """Flavor-basis value; the opposite flavor conjugates (real coefficients)."""
    delta = eps ** (1.0 / 3.0)
    total = 0.0 + 0.0j
    for t, f in enumerate(tp.chis):
        v = f(xi)
        if sign == -1:
            v = np.conj(v)
        total = total + v * delta**t
    return total


def growth_exponent(field, theta_a, window=(4.0, 10.0), sign=+1):
    """Fitted algebraic growth exponent after removing the Airy exponential."""
    xi = np.linspace(window[0], window[1], 60) * sign
    v = field(xi)
    z = (complex(theta_a) * xi).astype(complex)
    envelope = np.exp((2.0 / 3.0) * z ** 1.5)
    ratio = np.abs(v / envelope)
    slope = np.polyfit(np.log(np.abs(xi)), np.log(ratio), 1)[0]
    return float(slope)
