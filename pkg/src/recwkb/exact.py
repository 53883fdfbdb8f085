"""Ground truth for the expansions: exact iteration and stability scans.

The recurrence is iterated in companion form with all magnitudes kept in
log scale (or fully in mpmath for validation-grade runs), the iterates are
rescaled against truncated formal solutions to measure asymptoticity, and
transfer-matrix products quantify the stability constant that controls
error accumulation.
"""

import math

import mpmath
import numpy as np

from . import highprec
from .errors import (
    CoefficientVanishes,
    CoincidentNodes,
    IllConditionedFit,
    InsufficientDecades,
)

RENORM_EVERY = 64


class LogScaledTrajectory:
    """Solution samples stored as log-magnitude plus unit direction."""

    def __init__(self, ks, logmag, direction, eps, init_label=""):
        self.ks = np.asarray(ks, dtype=int)
        self.logmag = np.asarray(logmag, dtype=float)
        self.direction = np.asarray(direction, dtype=complex)
        self.eps = eps
        self.init_label = init_label

    def __len__(self):
        return len(self.ks)

    def log_value(self, k):
        i = int(np.searchsorted(self.ks, k))
        if i >= len(self.ks) or self.ks[i] != k:
            raise KeyError(f"step {k} not stored")
        return self.logmag[i], self.direction[i]

    def value(self, k):
        lm, d = self.log_value(k)
        return math.exp(lm) * d if lm < 700 else complex(np.inf)

    def values_rel(self, ks, log_offset=None):
        """Values of y_k * exp(-log_offset(k)); offset defaults to max logmag."""
        idx = np.searchsorted(self.ks, ks)
        lm = self.logmag[idx]
        d = self.direction[idx]
        off = lm.max() if log_offset is None else np.asarray(log_offset)
        return np.exp(lm - off) * d


def _mp_coeff(spec, j, x, eps):
    return spec.coeff_exact_mp(j, x, eps)


def iterate(spec, eps, init, k_range, direction="forward", keep_every=1):
    """Exactly iterate the recurrence; returns a LogScaledTrajectory.

    init supplies the l values at the starting edge: y_{k_lo..k_lo+l-1} for
    forward runs, y_{k_hi-l+1..k_hi} for backward runs. Arithmetic is
    mpmath (DPS digits) with log-scale output, so exponents eps^-1 * Phi
    up to ~1e4 are routine.
    """
    k_lo, k_hi = int(k_range[0]), int(k_range[1])
    l = spec.l
    if k_hi - k_lo + 1 < l + 1:
        raise ValueError("k_range shorter than the recurrence order")
    with mpmath.workdps(highprec.DPS):
        window = [highprec._mp(v) for v in init]
        if len(window) != l:
            raise ValueError(f"need {l} initial values")
        out_k, out_lm, out_dir = [], [], []
        scale_log = mpmath.mpf(0)

        def record(k, v):
            if (k - k_lo) % keep_every and k not in (k_lo, k_hi):
                return
            a = abs(v)
            if a == 0:
                out_k.append(k)
                out_lm.append(-math.inf)
                out_dir.append(0j)
                return
            out_k.append(k)
            out_lm.append(float(mpmath.log(a) + scale_log))
            out_dir.append(complex(v / a))

        eps_mp = mpmath.mpf(eps)
        if direction == "forward":
            for i, v in enumerate(window):
                record(k_lo + i, v)
            k = k_lo
            while k + l <= k_hi:
                x = k * eps_mp
                al = _mp_coeff(spec, l, x, eps)
                if abs(al) == 0:
                    raise CoefficientVanishes(f"a_l vanishes at k={k}", k=k)
                s = mpmath.mpc(0)
                for j in range(l):
                    s += _mp_coeff(spec, j, x, eps) * window[j]
                new = -s / al
                window = window[1:] + [new]
                k += 1
                record(k + l - 1, new)
                if (k - k_lo) % RENORM_EVERY == 0:
                    m = max(abs(w) for w in window)
                    if m > 0 and (m > 1e8 or m < 1e-8):
                        lg = mpmath.log(m)
                        scale_log += lg
                        window = [w / m for w in window]
        elif direction == "backward":
            for i, v in enumerate(window):
                record(k_hi - l + 1 + i, v)
            k = k_hi - l
            while k >= k_lo:
                x = k * eps_mp
                a0 = _mp_coeff(spec, 0, x, eps)
                if abs(a0) == 0:
                    raise CoefficientVanishes(f"a_0 vanishes at k={k}", k=k)
                s = mpmath.mpc(0)
                for j in range(1, l + 1):
                    s += _mp_coeff(spec, j, x, eps) * window[j - 1]
                new = -s / a0
                window = [new] + window[:-1]
                record(k, new)
                k -= 1
                if (k_hi - k) % RENORM_EVERY == 0:
                    m = max(abs(w) for w in window)
                    if m > 0 and (m > 1e8 or m < 1e-8):
                        lg = mpmath.log(m)
                        scale_log += lg
                        window = [w / m for w in window]
        else:
            raise ValueError("direction must be forward or backward")

    order = np.argsort(out_k)
    return LogScaledTrajectory(
        np.array(out_k)[order],
        np.array(out_lm)[order],
        np.array(out_dir)[order],
        eps,
        init_label=f"{direction} from given {l} values",
    )


def residual_check(spec, traj, sample=16, rng=None):
    """Max relative recurrence residual of a trajectory at random steps."""
    rng = rng or np.random.default_rng(0)
    l = spec.l
    ks = traj.ks
    candidates = [k for k in ks if all(kk in ks for kk in range(k, k + l + 1))]
    candidates = [k for k in candidates if k + l <= ks.max()]
    if not candidates:
        return 0.0
    picks = rng.choice(candidates, size=min(sample, len(candidates)), replace=False)
    worst = 0.0
    for k in picks:
        lms = np.array([traj.log_value(k + j)[0] for j in range(l + 1)])
        dirs = np.array([traj.log_value(k + j)[1] for j in range(l + 1)])
        ref = lms.max()
        terms = np.array(
            [
                complex(spec.coeff_value(j, k * traj.eps, traj.eps))
                * math.exp(lms[j] - ref)
                * dirs[j]
                for j in range(l + 1)
            ]
        )
        denom = np.abs(terms).max()
        if denom > 0:
            worst = max(worst, abs(terms.sum()) / denom)
    return worst


def formal_init(phi, eps, ks):
    """Starting values from the truncated formal solution (mp-grade log)."""
    vals = []
    for k in ks:
        L = phi.formal_log_mp_step(k, eps)
        vals.append(mpmath.exp(L))
    return vals


def rescaled_iterate(spec, phi, eps, init_rule="formal", k_samples=None,
                     direction=None):
    """Ratios C_k = Y_k / formal_solution(k eps) along the region.

    The exact solution starts from the truncated formal values at the
    region edge (the natural admissible initial data); for a recessive
    branch iterate backward so the target solution is the stable one.
    The whole loop runs in mpmath: |C_k - 1| down to ~1e-30 is meaningful
    (a float64 round-trip of log Y_k alone would floor it near 1e-12).
    """
    lo, hi = phi.region
    k_lo = int(math.ceil(lo / eps - 1e-9))
    k_hi = int(math.floor(hi / eps + 1e-9))
    if direction is None:
        direction = "forward" if phi.branch.modulus_rank == spec.l - 1 else "backward"
    if k_samples is None:
        step = max((k_hi - k_lo) // 400, 1)
        k_samples = list(range(k_lo, k_hi - spec.l + 1, step))
    wanted = set(k_samples)
    l = spec.l
    cs_by_k = {}
    with mpmath.workdps(highprec.DPS):
        eps_mp = mpmath.mpf(eps)

        def emit(k, value, scale_log):
            if k in wanted and abs(value) > 0:
                L = phi.formal_log_mp(k * eps_mp, eps)
                c = mpmath.exp(mpmath.log(abs(value)) + scale_log - L) * (value / abs(value))
                cs_by_k[k] = complex(c)

        if direction == "forward":
            init_ks = list(range(k_lo, k_lo + l))
        else:
            init_ks = list(range(k_hi - l + 1, k_hi + 1))
        window = [mpmath.exp(phi.formal_log_mp(k * eps_mp, eps)) for k in init_ks]
        scale_log = mpmath.mpf(0)
        if direction == "forward":
            for i, k in enumerate(init_ks):
                emit(k, window[i], scale_log)
            k = k_lo
            while k + l <= k_hi:
                x = k * eps_mp
                s = mpmath.mpc(0)
                for j in range(l):
                    s += _mp_coeff(spec, j, x, eps) * window[j]
                new = -s / _mp_coeff(spec, l, x, eps)
                window = window[1:] + [new]
                k += 1
                emit(k + l - 1, new, scale_log)
                if (k - k_lo) % RENORM_EVERY == 0:
                    m = max(abs(w) for w in window)
                    if m > 0 and (m > 1e8 or m < 1e-8):
                        scale_log += mpmath.log(m)
                        window = [w / m for w in window]
        else:
            for i, k in enumerate(init_ks):
                emit(k, window[i], scale_log)
            k = k_hi - l
            while k >= k_lo:
                x = k * eps_mp
                s = mpmath.mpc(0)
                for j in range(1, l + 1):
                    s += _mp_coeff(spec, j, x, eps) * window[j - 1]
                new = -s / _mp_coeff(spec, 0, x, eps)
                window = [new] + window[:-1]
                emit(k, new, scale_log)
                k -= 1
                if (k_hi - k) % RENORM_EVERY == 0:
                    m = max(abs(w) for w in window)
                    if m > 0 and (m > 1e8 or m < 1e-8):
                        scale_log += mpmath.log(m)
                        window = [w / m for w in window]
    ks = sorted(cs_by_k)
    return np.array(ks), np.array([cs_by_k[k] for k in ks])


def asymptoticity_fit(spec, phi, eps_list, orders=None):
    """Slope of log max|C_k - 1| vs log eps for each truncation order.

    Returns {s: (slope, max_devs)}; the fitted global shift s0 is
    max(0, max_s(s + 1 - slope_s)).
    """
    eps_list = sorted(eps_list, reverse=True)
    if len(eps_list) < 4 or eps_list[0] / eps_list[-1] < 10**1.5 - 1e-9:
        raise InsufficientDecades("need >= 4 eps values spanning >= 1.5 decades")
    orders = list(range(phi.S + 1)) if orders is None else orders
    out = {}
    for s in orders:
        view = phi.truncated(s)
        devs = []
        for eps in eps_list:
            _, cs = rescaled_iterate(spec, view, eps)
            devs.append(np.abs(cs - 1.0).max())
        slope = float(np.polyfit(np.log(eps_list), np.log(devs), 1)[0])
        out[s] = (slope, np.array(devs))
    return out


def fitted_shift(fit_results):
    """Global shift s0 closing the gap to the eps^(s+1) contract."""
    return max(0.0, max(s + 1 - slope for s, (slope, _) in fit_results.items()))


def shift_needed(fit_results, slope_tol=0.2):
    """Smallest shift s0 with slope_s >= s + 1 - s0 - slope_tol for all s."""
    return max(
        0.0, max(s + 1 - slope_tol - slope for s, (slope, _) in fit_results.items())
    )


# ---------------------------------------------------------------------------
# transfer matrices and stability


class TransferMatrix:
    """Companion one-step matrix of the (rescaled) recurrence at step k."""

    def __init__(self, matrix, k, eps):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.k = k
        self.eps = eps


def transfer_matrix(coeffs, k=0, eps=0.0):
    """Companion matrix from coefficients (a_0, ..., a_l)."""
    a = np.asarray(coeffs, dtype=complex)
    l = len(a) - 1
    M = np.zeros((l, l), dtype=complex)
    M[0, :] = -a[l - 1 :: -1] / a[l]
    if l > 1:
        M[np.arange(1, l), np.arange(0, l - 1)] = 1.0
    return TransferMatrix(M, k, eps)


def rescaled_coefficients(spec, phi, eps, k):
    """Coefficients of the recurrence for C_k = Y_k / formal(k eps)."""
    x = k * eps
    out = []
    base = phi.exponent_sum(x, eps)
    for j in range(spec.l + 1):
        ratio = np.exp(
            (phi.exponent_sum(x + j * eps, eps) - base) / eps
        )
        out.append(complex(spec.coeff_value(j, x, eps)) * ratio)
    return np.array(out)


def _rescaled_coefficient_table(spec, phi, eps, k_lo, k_hi):
    """(k_hi - k_lo + 1, l + 1) array of rescaled coefficients, vectorized."""
    ks = np.arange(k_lo, k_hi + 1)
    xs = ks * eps
    base = phi.exponent_sum(xs, eps)
    out = np.empty((len(ks), spec.l + 1), dtype=complex)
    for j in range(spec.l + 1):
        ratio = np.exp((phi.exponent_sum(xs + j * eps, eps) - base) / eps)
        out[:, j] = spec.coeff_value(j, xs, eps) * ratio
    return ks, out


def stability_norm_scan(spec, phi, eps, region=None, pair_count=24, seed=0,
                        max_span=None):
    """Fitted constant C in ||A_k ... A_(j+1)|| <= 1 + C |k-j| eps.

    Samples window products of the rescaled transfer matrices and reports
    max (||P|| - 1) / (|k-j| eps) together with the per-window data.
    """
    lo, hi = region if region is not None else phi.region
    k_lo = int(math.ceil(lo / eps)) + 1
    k_hi = int(math.floor(hi / eps)) - spec.l - 1
    ks, table = _rescaled_coefficient_table(spec, phi, eps, k_lo, k_hi)
    mats = np.zeros((len(ks), spec.l, spec.l), dtype=complex)
    l = spec.l
    mats[:, 0, :] = -table[:, l - 1 :: -1] / table[:, l : l + 1]
    if l > 1:
        mats[:, np.arange(1, l), np.arange(0, l - 1)] = 1.0
    rng = np.random.default_rng(seed)
    total = k_hi - k_lo
    if max_span is None:
        max_span = total
    rows = []
    worst = 0.0
    for _ in range(pair_count):
        # windows sampled by x-extent so the fitted constant is comparable
        # across eps (fixed step counts would divide transient norm growth
        # by a vanishing |k-j| eps)
        frac = rng.uniform(0.1, 0.95)
        span = min(int(frac * total), max_span)
        j0 = int(rng.integers(k_lo, max(k_lo + 1, k_hi - span)))
        i0 = j0 - k_lo
        i1 = min(i0 + span, len(ks))
        P = np.eye(l, dtype=complex)
        lognorm = 0.0
        for i in range(i0, i1):
            P = mats[i] @ P
            if (i - i0) % RENORM_EVERY == 0:
                nn = np.linalg.norm(P, 2)
                if nn > 0 and (nn > 1e100 or nn < 1e-100):
                    P /= nn
                    lognorm += math.log(nn)
        nrm = float(np.linalg.norm(P, 2)) * math.exp(lognorm)
        span_eff = i1 - i0
        c_here = (nrm - 1.0) / (span_eff * eps) if span_eff > 0 else 0.0
        rows.append((j0, span_eff, nrm, c_here))
        worst = max(worst, c_here)
    return worst, rows


# ---------------------------------------------------------------------------
# Vandermonde identity


def vandermonde_ratio(x_nodes, y_nodes):
    """(X^-1 Y)_{ij} = prod_{n != i} (y_j - x_n) / (x_i - x_n).

    X, Y are Vandermonde-type matrices X_{ij} = x_j^{l-i}; the product
    formula avoids forming or inverting either.
    """
    x = np.asarray(x_nodes, dtype=complex)
    y = np.asarray(y_nodes, dtype=complex)
    l = len(x)
    if len(y) != l:
        raise ValueError("node lists must have equal length")
    gaps = np.abs(x[:, None] - x[None, :]) + np.eye(l) * np.inf
    if gaps.min() < 1e-12 * max(1.0, np.abs(x).max()):
        raise CoincidentNodes("x nodes are not pairwise distinct")
    out = np.empty((l, l), dtype=complex)
    for i in range(l):
        others = np.array([x[n] for n in range(l) if n != i])
        denom = np.prod(x[i] - others)
        for j in range(l):
            out[i, j] = np.prod(y[j] - others) / denom
    return out


# ---------------------------------------------------------------------------
# full validation report


class ValidationReport:
    def __init__(self):
        self.branch_fits = {}       # (branch_id, region) -> {s: slope}
        self.shift_s0 = {}          # (branch_id, region) -> s0
        self.fundamental = {}       # region -> dict(residual=, cond=, coeffs=)
        self.stokes = None
        self.flags = []

    def ok(self):
        return not self.flags

    def as_dict(self):
        return {
            "branch_fits": {str(k): {int(s): v[0] for s, v in d.items()}
                            for k, d in self.branch_fits.items()},
            "shift_s0": {str(k): v for k, v in self.shift_s0.items()},
            "fundamental": {str(k): v for k, v in self.fundamental.items()},
            "stokes": self.stokes,
            "flags": list(self.flags),
        }


def fundamental_fit(spec, phis, eps, seed=0, samples=40, traj=None):
    """Fit a random-initial-condition solution in the expansion basis.

    Returns (relative residual, condition number, coefficients). Basis
    values and the exact trajectory are both evaluated in mp, rescaled
    per-step by the dominant basis magnitude before the least squares.
    A trajectory spanning the region may be passed in (shared across
    regions to exhibit coefficient jumps at a crossing).
    """
    region = phis[0].region
    lo, hi = region
    k_lo = int(math.ceil(lo / eps)) + 1
    k_hi = int(math.floor(hi / eps)) - spec.l - 1
    if traj is None:
        rng = np.random.default_rng(seed)
        init = rng.standard_normal(spec.l) + 1j * rng.standard_normal(spec.l)
        traj = iterate(spec, eps, list(init), (k_lo, k_hi))
    ks = np.unique(np.linspace(k_lo + 1, k_hi - spec.l, samples).astype(int))
    ks = ks[(ks >= traj.ks.min()) & (ks <= traj.ks.max() - spec.l)]
    with mpmath.workdps(highprec.DPS):
        logs = np.empty((len(ks), len(phis)), dtype=object)
        for c, phi in enumerate(phis):
            for r, k in enumerate(ks):
                logs[r, c] = phi.formal_log_mp_step(k, eps)
        B = np.empty((len(ks), len(phis)), dtype=complex)
        rhs = np.empty(len(ks), dtype=complex)
        for r, k in enumerate(ks):
            ref = max(mpmath.re(logs[r, c]) for c in range(len(phis)))
            for c in range(len(phis)):
                B[r, c] = complex(mpmath.exp(logs[r, c] - ref))
            lm, d = traj.log_value(k)
            rhs[r] = complex(mpmath.exp(mpmath.mpf(lm) - ref)) * d
    sol, *_ = np.linalg.lstsq(B, rhs, rcond=None)
    resid = np.linalg.norm(B @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300)
    cond = float(np.linalg.cond(B))
    if not np.isfinite(cond):
        raise IllConditionedFit("fundamental-system design matrix is singular")
    return float(resid), cond, sol


def validate_wkb(spec, phis_by_region, eps_list, orders=(0, 1, 2, 3), seed=0):
    """Full validation: per-branch asymptoticity plus fundamental fits.

    phis_by_region: dict region_key -> list of PhiExpansion (one per branch).
    With several regions, one shared random solution is fitted per region
    and the per-region coefficient vectors are reported (they jump across
    a crossing).
    """
    report = ValidationReport()
    eps_min = min(eps_list)
    shared_traj = None
    if len(phis_by_region) > 1:
        lo = min(p[0].region[0] for p in phis_by_region.values())
        hi = max(p[0].region[1] for p in phis_by_region.values())
        rng = np.random.default_rng(seed)
        init = rng.standard_normal(spec.l) + 1j * rng.standard_normal(spec.l)
        k_lo = int(math.ceil(lo / eps_min)) + 1
        k_hi = int(math.floor(hi / eps_min)) - spec.l - 1
        shared_traj = iterate(spec, eps_min, list(init), (k_lo, k_hi))
    stokes = {}
    for key, phis in phis_by_region.items():
        for phi in phis:
            use = [s for s in orders if s <= phi.S]
            fits = asymptoticity_fit(spec, phi, eps_list, orders=use)
            report.branch_fits[(phi.branch_id, key)] = fits
            s0 = shift_needed(fits)
            report.shift_s0[(phi.branch_id, key)] = s0
            if s0 > 1.0:
                report.flags.append(
                    f"branch {phi.branch_id} region {key}: shift s0={s0:.2f} > 1"
                )
        resid, cond, coeffs = fundamental_fit(
            spec, phis, eps_min, seed=seed, traj=shared_traj
        )
        report.fundamental[key] = {
            "residual": resid,
            "cond": cond,
            "coeffs": [(c.real, c.imag) for c in coeffs],
        }
        stokes[key] = np.asarray(coeffs)
        if resid > 1e-6:
            report.flags.append(f"region {key}: fundamental fit residual {resid:.2e}")
    if len(stokes) > 1:
        keys = sorted(stokes)
        diffs = {}
        for i in range(len(keys) - 1):
            a, b = stokes[keys[i]], stokes[keys[i + 1]]
            denom = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
            diffs[f"{keys[i]} -> {keys[i + 1]}"] = float(
                np.abs(a - b).max() / denom
            )
        report.stokes = diffs
    return report
