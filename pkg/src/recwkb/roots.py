"""Characteristic roots along the interval: branches, ordering, crossings.

Roots of sum_j a_j(x, 0) lambda^j are solved per abscissa (companion-matrix
eigenvalues plus one Newton polish), continued into branches by nearest-
neighbour matching with adaptive refinement, ranked by modulus into regions
of constant ordering, and scanned for generic (square-root) crossings.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from . import cheb
from .errors import (
    BranchJumpDetected,
    LeadingCoefficientVanishes,
    NonGenericCrossing,
)
from .fields import ScalarField
from .series import TaylorSeries

MODULUS_TIE_REL = 1e-9


def char_roots_at(spec, x, eps=0.0, use_full=False, polish=True):
    """Roots (with multiplicity) of the characteristic polynomial at x.

    use_full solves with the eps-dependent coefficients a_j(x, eps); the
    default uses a_j(x, 0). Returns an array of l roots.
    """
    if use_full:
        a = np.array(
            [complex(_series_value(spec, j, x, eps)) for j in range(spec.l + 1)]
        )
    else:
        a = np.array([complex(_term_value(spec, j, 0, x)) for j in range(spec.l + 1)])
    scale = np.abs(a).max()
    if abs(a[-1]) < 1e-13 * scale:
        raise LeadingCoefficientVanishes(
            f"|a_l| = {abs(a[-1]):.2e} at x = {x} (scale {scale:.2e})"
        )
    roots = np.roots(a[::-1])
    if polish:
        dp = np.polynomial.polynomial.polyder(a)
        for _ in range(2):
            pv = np.polynomial.polynomial.polyval(roots, a)
            dv = np.polynomial.polynomial.polyval(roots, dp)
            step = np.where(np.abs(dv) > 1e-14 * scale, pv / np.where(dv == 0, 1, dv), 0.0)
            roots = roots - step
    return roots


def _term_value(spec, j, s, x):
    """Value of a_{j,s}(x); prefers the closed form (valid off-grid too)."""
    exprs = spec.coeffs[j].exprs
    if exprs and s < len(exprs) and exprs[s] is not None:
        return exprs[s](x=complex(x))
    f = spec.coeffs[j].term(s)
    return complex(f(x)) if f is not None else 0.0


def _series_value(spec, j, x, eps):
    return sum(
        _term_value(spec, j, s, x) * eps**s for s in range(spec.coeffs[j].order + 1)
    )


class RootBranch:
    """One continuous root branch lambda_m(x) with its modulus rank."""

    def __init__(self, branch_id, lam_field, modulus_rank=None, spec=None):
        self.branch_id = branch_id
        self.lam = lam_field
        self.modulus_rank = modulus_rank
        self.spec = spec

    def __call__(self, x):
        return self.lam(x)

    def taylor(self, x0, order):
        return self.lam.taylor(x0, order)


def branch_values_pointwise(branches, x):
    """Exact root values at x assigned to branches by nearest prediction.

    Re-solves the characteristic polynomial, so values stay correct even
    where the interpolated branch fields smooth a square-root cusp.
    """
    spec = branches[0].spec
    if spec is None:
        return np.array([b(x) for b in branches])
    roots = char_roots_at(spec, x)
    pred = np.array([b(x) for b in branches])
    cost = np.abs(pred[:, None] - roots[None, :])
    _, cols = linear_sum_assignment(cost)
    return roots[cols]


from collections import namedtuple

Region = namedtuple("Region", ["lo", "hi", "perm", "ties"])


class RegionPartition:
    """Subintervals on which the modulus ordering of the branches is fixed.

    Each region records the ascending-modulus permutation of branch ids and
    the tie pattern between consecutive entries (True where moduli agree,
    e.g. a conjugate pair ordered by argument).
    """

    def __init__(self, regions):
        self.regions = regions

    def __len__(self):
        return len(self.regions)

    def region_of(self, x):
        for r in self.regions:
            if r.lo - 1e-12 <= x <= r.hi + 1e-12:
                return r
        raise ValueError(f"{x} outside the partition")


class CrossingCandidate:
    def __init__(self, x_star, pair, genericity_constant, exponent):
        self.x_star = x_star
        self.pair = pair
        self.genericity_constant = genericity_constant
        self.exponent = exponent

    def __repr__(self):
        return (
            f"CrossingCandidate(x*={self.x_star:.6g}, pair={self.pair}, "
            f"c={self.genericity_constant:.4g}, p={self.exponent:.3f})"
        )


def _roots_on_grid(spec, xs):
    """(len(xs), l) array of matched root values: continuous branches."""
    rows = [np.sort_complex(char_roots_at(spec, xs[0]))]
    for x in xs[1:]:
        prev = rows[-1]
        cur = char_roots_at(spec, x)
        cost = np.abs(prev[:, None] - cur[None, :])
        _, cols = linear_sum_assignment(cost)
        rows.append(cur[cols])
    return np.array(rows)


def _min_gap(row):
    l = len(row)
    if l == 1:
        return np.inf
    d = np.abs(row[:, None] - row[None, :]) + np.diag(np.full(l, np.inf))
    return d.min()


def branch_jet_fn(spec, branch_field):
    """Taylor towers of a root branch by implicit differentiation.

    Solves P(x0 + h, lam(h)) = 0 order by order from the branch value,
    using exact coefficient towers, so high derivatives of lambda stay
    accurate to rounding.
    """

    def jet(x0, order):
        x0 = np.asarray(x0, dtype=complex)
        A = [spec.coeffs[j].taylor_term(0, x0, order) for j in range(spec.l + 1)]
        lam0 = np.asarray(branch_field(np.real(x0)), dtype=complex)
        a0 = np.array([t.c[0] for t in A])
        dp = np.zeros_like(lam0)
        for j in range(1, spec.l + 1):
            dp = dp + j * a0[j] * lam0 ** (j - 1)
        c = np.zeros((order + 1,) + lam0.shape, dtype=complex)
        c[0] = lam0
        # one scalar Newton polish of the value itself
        pv = np.zeros_like(lam0)
        for j in range(spec.l + 1):
            pv = pv + a0[j] * lam0**j
        c[0] = c[0] - pv / dp
        lam = TaylorSeries(c)
        for q in range(1, order + 1):
            resid = None
            for j in range(spec.l + 1):
                term = A[j] * (lam ** j)
                resid = term if resid is None else resid + term
            lam.c[q] -= resid.c[q] / dp
        return lam

    return jet


def track_branches(spec, grid_resolution=512, field_n=None):
    """Continuous root branches as fields over the interval.

    Raises BranchJumpDetected when matching stays ambiguous after local
    refinement away from any root coincidence. Branches passing through a
    genuine crossing remain continuous (the gap closes like sqrt).
    """
    lo, hi = spec.interval
    xs = np.linspace(lo, hi, grid_resolution)
    table = _roots_on_grid(spec, xs)

    # flag steps whose motion is large relative to the local gap, then
    # refine; a persistent violation with a non-collapsing gap is a jump
    for i in range(len(xs) - 1):
        move = np.abs(table[i + 1] - table[i]).max()
        gap = min(_min_gap(table[i]), _min_gap(table[i + 1]))
        if move < 0.5 * gap:
            continue
        sub = np.linspace(xs[i], xs[i + 1], 33)
        subtab = _roots_on_grid(spec, sub)
        submoves = np.abs(np.diff(subtab, axis=0)).max(axis=1)
        subgaps = np.array([_min_gap(r) for r in subtab])
        bad = submoves > 0.5 * np.minimum(subgaps[:-1], subgaps[1:])
        collapsing = subgaps.min() < 0.05 * max(subgaps.max(), 1e-30)
        if bad.any() and not collapsing:
            raise BranchJumpDetected(
                f"root matching ambiguous near x = {xs[i]:.6g}; refine the grid"
            )

    # represent each branch on a Chebyshev grid, matched to the table
    n = field_n or 128
    nodes = cheb.lobatto_nodes(n, lo, hi)
    node_roots = np.array(
        [char_roots_at(spec, x) for x in nodes]
    )
    branches = []
    vals = np.empty((spec.l, n + 1), dtype=complex)
    for i, x in enumerate(nodes):
        idx = np.searchsorted(xs, x)
        idx = min(max(idx, 0), len(xs) - 1)
        ref = table[idx]
        cost = np.abs(ref[:, None] - node_roots[i][None, :])
        _, cols = linear_sum_assignment(cost)
        vals[:, i] = node_roots[i][cols]
    for m in range(spec.l):
        f = ScalarField.from_values(spec.interval, vals[m])
        f.jet_fn = branch_jet_fn(spec, f)
        branches.append(RootBranch(m, f, spec=spec))
    _assign_ranks(branches)
    return branches


def _assign_ranks(branches):
    lo, hi = branches[0].lam.interval
    xm = 0.5 * (lo + hi)
    row = np.array([b(xm) for b in branches])
    order, _ = _modulus_signature(row)
    for pos, m in enumerate(order):
        branches[m].modulus_rank = int(pos)


def region_branch(spec, region, rank, n=128):
    """Branch of given modulus rank tracked pointwise on a subinterval.

    Use this to expand near (but not across) a crossing: a branch field
    interpolated over the whole interval is polluted globally by the
    square-root cusp, while pointwise re-solving plus local continuity
    matching stays accurate. Rank counts ascending modulus (ties by angle)
    at the best-separated node of the region.
    """
    lo, hi = region
    nodes = cheb.lobatto_nodes(n, lo, hi)
    rows = [char_roots_at(spec, nodes[0])]
    for x in nodes[1:]:
        cur = char_roots_at(spec, x)
        cost = np.abs(rows[-1][:, None] - cur[None, :])
        _, cols = linear_sum_assignment(cost)
        rows.append(cur[cols])
    table = np.array(rows)
    gaps = np.array([_min_gap(r) for r in table])
    i_ref = int(np.argmax(gaps))
    order, _ = _modulus_signature(table[i_ref])
    column = order[rank]
    f = ScalarField.from_values(region, table[:, column])
    f.jet_fn = branch_jet_fn(spec, f)
    out = RootBranch(rank, f, modulus_rank=rank, spec=spec)
    return out


def partition_by_modulus(branches, samples=2048):
    """Split the interval into regions of constant modulus ordering."""
    lo, hi = branches[0].lam.interval
    xs = np.linspace(lo, hi, samples)
    sigs = [_modulus_signature(branch_values_pointwise(branches, x)) for x in xs]
    boundaries = [lo]
    sig_list = [sigs[0]]
    cur = sigs[0]
    for i in range(1, samples):
        if sigs[i] != cur:
            # refine the boundary by bisection on the signature change
            a, b = xs[i - 1], xs[i]
            for _ in range(48):
                mid = 0.5 * (a + b)
                s = _modulus_signature(branch_values_pointwise(branches, mid))
                if s == cur:
                    a = mid
                else:
                    b = mid
            boundaries.append(0.5 * (a + b))
            cur = sigs[i]
            sig_list.append(cur)
    boundaries.append(hi)
    regions = []
    for i, sig in enumerate(sig_list):
        if boundaries[i + 1] - boundaries[i] > 1e-9 * (hi - lo):
            regions.append(Region(boundaries[i], boundaries[i + 1], sig[0], sig[1]))
    merged = [regions[0]]
    for r in regions[1:]:
        if (r.perm, r.ties) == (merged[-1].perm, merged[-1].ties):
            merged[-1] = Region(merged[-1].lo, r.hi, r.perm, r.ties)
        else:
            merged.append(r)
    return RegionPartition(merged)


def _modulus_signature(row, tie_rel=None):
    """Ordering permutation plus tie pattern for one slice of root values.

    Moduli within tie_rel of each other are grouped; within a tie group the
    order is fixed by complex argument, so conjugate pairs rank the same way
    at every abscissa.
    """
    tie_rel = MODULUS_TIE_REL if tie_rel is None else tie_rel
    mods = np.abs(row)
    scale = max(mods.max(), 1e-300)
    by_mod = sorted(range(len(row)), key=lambda m: mods[m])
    groups = [[by_mod[0]]]
    for m in by_mod[1:]:
        if mods[m] - mods[groups[-1][-1]] <= tie_rel * scale:
            groups[-1].append(m)
        else:
            groups.append([m])
    order, ties = [], []
    for gi, g in enumerate(groups):
        g_sorted = sorted(g, key=lambda m: np.angle(row[m]))
        for pos, m in enumerate(g_sorted):
            order.append(m)
            if len(order) > 1:
                ties.append(pos > 0)
    return tuple(order), tuple(ties)


def detect_crossings(branches, spec, window=0.05, accept_tol=0.1):
    """Locate and classify pairwise root coincidences inside the interval.

    Each candidate carries the fitted exponent p and constant c in
    |lam_m - lam_n| ~ c |x - x*|^p; candidates with |p - 0.5| > accept_tol
    raise NonGenericCrossing.
    """
    lo, hi = branches[0].lam.interval
    xs = np.linspace(lo, hi, 4096)
    found = []
    for m in range(len(branches)):
        for n in range(m + 1, len(branches)):

            def pair_gap(x, m=m, n=n):
                vals = branch_values_pointwise(branches, float(x))
                return float(np.abs(vals[m] - vals[n]))

            gap = np.array([pair_gap(x) for x in xs])
            scale = gap.max()
            if scale == 0.0:
                continue
            i0 = int(np.argmin(gap))
            if gap[i0] > 0.02 * scale:
                continue
            a = xs[max(i0 - 2, 0)]
            b = xs[min(i0 + 2, len(xs) - 1)]
            res = minimize_scalar(
                pair_gap, bounds=(a, b), method="bounded", options={"xatol": 1e-14}
            )
            x_star = float(res.x)
            if pair_gap(x_star) > 0.01 * scale:
                continue
            c, p = _fit_gap_power(pair_gap, x_star, lo, hi, window)
            if abs(p - 0.5) > accept_tol:
                raise NonGenericCrossing(
                    f"gap exponent {p:.3f} at x* = {x_star:.6g} not ~ 1/2",
                    exponent=p,
                )
            found.append(CrossingCandidate(x_star, (m, n), c, p))
    return found


def _fit_gap_power(pair_gap, x_star, lo, hi, window):
    pts = []
    for side in (-1.0, 1.0):
        for d in np.geomspace(window * 1e-3, window, 24):
            x = x_star + side * d
            if lo <= x <= hi:
                g = pair_gap(x)
                if g > 0:
                    pts.append((d, g))
    if len(pts) < 6:
        raise NonGenericCrossing(
            "not enough room around the candidate to fit", exponent=float("nan")
        )
    d = np.log([p[0] for p in pts])
    g = np.log([p[1] for p in pts])
    p, logc = np.polyfit(d, g, 1)
    return float(np.exp(logc)), float(p)
