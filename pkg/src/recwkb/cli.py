"""Batch frontend: run expansions, validations and demos from the shell.

Subcommands: roots, expand, validate, turning, scheme, demo. Artifacts are
CSV tables (per-abscissa data) and JSON summaries named
<problem>_<subcommand>_*.{csv,json}. Exit status 0 means every enabled
check passed; nonzero encodes the first failing check class (see EXIT_*).
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import exact, roots, schemes, turning, wkb
from .errors import RecwkbError, UnknownPreset
from .recurrence import parse_spec, preset

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESIDUAL = 3
EXIT_ASYMPTOTIC = 4
EXIT_TURNING = 5
EXIT_SCHEME = 6
EXIT_STABILITY = 7
EXIT_PROPERTY = 8


def _fmt(x):
    if isinstance(x, complex):
        return [_fmt(x.real), _fmt(x.imag)]
    if isinstance(x, float):
        return float(f"{x:.17g}")
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_fmt(v) for v in np.asarray(x).tolist()] if isinstance(x, np.ndarray) else [_fmt(v) for v in x]
    if isinstance(x, (np.floating,)):
        return float(f"{float(x):.17g}")
    if isinstance(x, (np.complexfloating,)):
        return _fmt(complex(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def write_json(path, obj):
    path = Path(path)
    path.write_text(json.dumps(_fmt(obj), indent=1, sort_keys=True) + "\n",
                    encoding="utf-8")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def load_problem(args):
    if args.preset:
        return preset(args.preset, interval=args.interval)
    if args.spec:
        return parse_spec(Path(args.spec).read_text(encoding="utf-8"))
    raise RecwkbError("pass --preset NAME or --spec FILE")


def _eps_list(text):
    return sorted((float(t) for t in text.split(",")), reverse=True)


def _orders(text):
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(t) for t in text.split(",")]


def cmd_roots(args, out):
    spec = load_problem(args)
    branches = roots.track_branches(spec, grid_resolution=args.grid)
    part = roots.partition_by_modulus(branches)
    xs = np.linspace(*spec.interval, args.grid)
    rows = []
    for x in xs:
        vals = roots.branch_values_pointwise(branches, x)
        row = [float(x)]
        for v in vals:
            row += [float(v.real), float(v.imag), float(abs(v))]
        rows.append(row)
    header = ["x"]
    for b in branches:
        header += [f"re_lam_{b.branch_id}", f"im_lam_{b.branch_id}", f"abs_lam_{b.branch_id}"]
    write_csv(out / f"{spec.name}_roots_branches.csv", header, rows)
    summary = {
        "name": spec.name,
        "ranks": {str(b.branch_id): b.modulus_rank for b in branches},
        "regions": [
            {"lo": r.lo, "hi": r.hi, "perm": list(r.perm), "ties": list(r.ties)}
            for r in part.regions
        ],
        "crossings": [
            {"x_star": c.x_star, "pair": list(c.pair),
             "constant": c.genericity_constant, "exponent": c.exponent}
            for c in roots.detect_crossings(branches, spec)
        ],
    }
    write_json(out / f"{spec.name}_roots_summary.json", summary)
    return EXIT_OK


def cmd_expand(args, out):
    spec = load_problem(args)
    branches = roots.track_branches(spec)
    m = args.branch
    phi = wkb.expand_branch(spec, branches[m], order=args.order)
    xs = phi.nodes
    rows = []
    for i, x in enumerate(xs):
        row = [float(x)]
        for t in range(phi.S + 1):
            v = phi.phis[t].values[i]
            row += [float(v.real), float(v.imag)]
        rows.append(row)
    header = ["x"] + [f"{p}_phi_{t}" for t in range(phi.S + 1) for p in ("re", "im")]
    write_csv(out / f"{spec.name}_expand_phi_branch{m}.csv", header, rows)
    fits = wkb.residual_order_fit(spec, phi, args.eps_list)
    summary = {
        "name": spec.name,
        "branch": m,
        "order": phi.S,
        "residual_slopes": {
            str(s): {"slope": f.slope, "constant": f.constant, "exact": f.exact}
            for s, f in fits.items()
        },
    }
    write_json(out / f"{spec.name}_expand_summary.json", summary)
    bad = [s for s, f in fits.items() if not f.exact and f.slope < s + 0.85]
    return EXIT_RESIDUAL if bad else EXIT_OK


def cmd_validate(args, out):
    spec = load_problem(args)
    branches = roots.track_branches(spec)
    part = roots.partition_by_modulus(branches)
    phis_by_region = {}
    smax = max(args.orders_list)
    glo, ghi = spec.interval
    for r in part.regions:
        lo, hi = r.lo, r.hi
        # stay clear of interior boundaries (crossings: transport refuses)
        if lo > glo + 1e-12 * (ghi - glo):
            lo += 0.10 * (r.hi - r.lo)
        if hi < ghi - 1e-12 * (ghi - glo):
            hi -= 0.10 * (r.hi - r.lo)
        key = f"[{lo:.6g},{hi:.6g}]"
        if len(part.regions) == 1:
            phis_by_region[key] = [
                wkb.expand_branch(spec, b, order=smax, region=(lo, hi))
                for b in branches
            ]
        else:
            phis_by_region[key] = [
                wkb.expand_branch(spec, rank, order=smax, region=(lo, hi))
                for rank in range(spec.l)
            ]
    report = exact.validate_wkb(spec, phis_by_region, args.eps_list,
                                orders=tuple(args.orders_list),
                                seed=getattr(args, "seed", 0))
    write_json(out / f"{spec.name}_validate_report.json", report.as_dict())
    rows = []
    for (bid, key), fits in report.branch_fits.items():
        for s, (slope, devs) in fits.items():
            for eps, d in zip(sorted(args.eps_list, reverse=True), devs):
                rows.append([key, bid, s, float(eps), float(d), float(slope)])
    write_csv(out / f"{spec.name}_validate_devs.csv",
              ["region", "branch", "order", "eps", "max_dev", "slope"], rows)
    return EXIT_OK if report.ok() else EXIT_ASYMPTOTIC


def cmd_turning(args, out):
    spec = load_problem(args)
    branches = roots.track_branches(spec)
    cands = roots.detect_crossings(branches, spec)
    if not cands:
        write_json(out / f"{spec.name}_turning_summary.json",
                   {"name": spec.name, "crossings": []})
        return EXIT_OK
    cand = cands[0]
    tp = turning.interior_expansion(spec, cand, order=args.order)
    eps = min(args.eps_list)
    lo, hi = spec.interval
    x_right = tp.x_star + 0.9 * (hi - tp.x_star)
    k_hi = int(x_right / eps)
    k_lo = int((tp.x_star + 0.9 * (lo - tp.x_star)) / eps)
    traj = exact.iterate(spec, eps, [1.0, 0.9], (k_lo, k_hi), direction="backward")
    ext_hi = min(0.16 * (hi - tp.x_star), hi - tp.x_star)
    region_r = (tp.x_star + 0.07 * ext_hi, tp.x_star + ext_hi)
    phis = [wkb.expand_branch(spec, rank, order=6, region=region_r, max_order=6)
            for rank in range(spec.l)]
    conn = turning.match_connection(phis, tp, eps, side="right",
                                    trajectory=traj, spec=spec,
                                    window=(args.beta_ext, args.alpha_int))
    rows = []
    for i, xi in enumerate(tp.xi_grid):
        row = [float(xi)]
        for t, f in enumerate(tp.chis):
            row += [float(f.values[i].real), float(f.values[i].imag)]
        rows.append(row)
    header = ["xi"] + [f"{p}_chi_{t}" for t in range(tp.S + 1) for p in ("re", "im")]
    write_csv(out / f"{spec.name}_turning_chi.csv", header, rows)
    summary = {
        "name": spec.name,
        "x_star": tp.x_star,
        "theta": complex(tp.theta),
        "theta_cubed": tp.theta.theta3,
        "airy_scale": tp.airy_scale,
        "connection": {
            "side": conn.side,
            "window": list(conn.overlap_window),
            "coefficients": [complex(c) for c in conn.coefficients],
            "fit_residual": conn.fit_residual,
        },
    }
    write_json(out / f"{spec.name}_turning_summary.json", summary)
    return EXIT_OK if conn.fit_residual < 0.01 else EXIT_TURNING


def cmd_scheme(args, out):
    spec = load_problem(args)
    q, _ = schemes.check_degeneracy(spec, args.eps_list)
    series = schemes.xi_series(spec, order=args.order)
    fits = schemes.scheme_error_order(spec, series, args.eps_list)
    xs = series.xis[0].grid
    rows = []
    for i, x in enumerate(xs):
        row = [float(x)] + [float(f.values[i].real) for f in series.xis]
        rows.append(row)
    write_csv(out / f"{spec.name}_scheme_xi.csv",
              ["x"] + [f"xi_{m}" for m in range(series.order + 1)], rows)
    summary = {
        "name": spec.name,
        "q": q,
        "error_slopes": {str(s): fits[s][0] for s in fits},
    }
    write_json(out / f"{spec.name}_scheme_summary.json", summary)
    ok = fits[0][0] > 1.8
    return EXIT_OK if ok else EXIT_SCHEME


def cmd_demo(args, out):
    name = args.which
    if name == "euler":
        ns = argparse.Namespace(preset="euler", spec=None, interval=None,
                                branch=0, order=6, seed=args.seed,
                                eps_list=[1e-2, 3e-3, 1e-3, 3e-4])
        return cmd_expand(ns, out)
    if name == "bessel":
        ns = argparse.Namespace(preset="bessel", spec=None, interval=None,
                                orders_list=[0, 1, 2, 3], seed=args.seed,
                                eps_list=[1e-2, 3e-3, 1e-3, 3e-4])
        rc = cmd_validate(ns, out)
        if rc:
            return rc
        ns2 = argparse.Namespace(preset="bessel", spec=None,
                                 interval=(-0.5, 0.5), order=2,
                                 eps_list=[1e-3], beta_ext=0.45,
                                 alpha_int=0.60, seed=args.seed)
        return cmd_turning(ns2, out)
    if name == "ode":
        ns = argparse.Namespace(preset="euler_scheme", spec=None, interval=None,
                                order=4, seed=args.seed,
                                eps_list=[1e-2, 5e-3, 2.5e-3, 1.25e-3])
        return cmd_scheme(ns, out)
    raise UnknownPreset(f"unknown demo {name!r}")


def build_parser():
    p = argparse.ArgumentParser(
        prog="recwkb",
        description="asymptotic expansions of slowly varying linear recurrences",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, preset_only=False):
        sp.add_argument("--spec", help="problem description file")
        sp.add_argument("--preset", help="built-in problem name")
        sp.add_argument("--interval", type=float, nargs=2, default=None)
        sp.add_argument("--out", default=".", help="artifact directory")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("roots", help="root branches, regions, crossings")
    common(sp)
    sp.add_argument("--grid", type=int, default=256)
    sp.set_defaults(fn=cmd_roots)

    sp = sub.add_parser("expand", help="phases of one branch plus residual slopes")
    common(sp)
    sp.add_argument("--branch", type=int, default=0)
    sp.add_argument("--order", type=int, default=4)
    sp.add_argument("--eps-list", dest="eps_list", type=_eps_list,
                    default=[1e-2, 3e-3, 1e-3])
    sp.set_defaults(fn=cmd_expand)

    sp = sub.add_parser("validate", help="asymptoticity of exact iterates")
    common(sp)
    sp.add_argument("--orders", dest="orders_list", type=_orders, default=[0, 1, 2, 3])
    sp.add_argument("--eps-list", dest="eps_list", type=_eps_list,
                    default=[1e-2, 3e-3, 1e-3, 3e-4])
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("turning", help="crossing analysis and matching")
    common(sp)
    sp.add_argument("--order", type=int, default=2)
    sp.add_argument("--eps-list", dest="eps_list", type=_eps_list, default=[1e-3])
    sp.add_argument("--alpha-int", dest="alpha_int", type=float, default=0.60)
    sp.add_argument("--beta-ext", dest="beta_ext", type=float, default=0.45)
    sp.set_defaults(fn=cmd_turning)

    sp = sub.add_parser("scheme", help="power-series solution of a degenerate scheme")
    common(sp)
    sp.add_argument("--order", type=int, default=4)
    sp.add_argument("--eps-list", dest="eps_list", type=_eps_list,
                    default=[1e-2, 5e-3, 2.5e-3, 1.25e-3])
    sp.set_defaults(fn=cmd_scheme)

    sp = sub.add_parser("demo", help="preset pipelines: euler, bessel, ode")
    sp.add_argument("which", choices=["euler", "bessel", "ode"])
    sp.add_argument("--out", default=".")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_demo)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if getattr(args, "interval", None) is not None:
        args.interval = tuple(args.interval)
    try:
        return args.fn(args, out)
    except UnknownPreset as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RecwkbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
