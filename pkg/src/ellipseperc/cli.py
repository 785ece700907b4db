"""Command line entry point: ``ellipseperc <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 3 model/runtime failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import montecarlo as mc
from . import multiscale as ms
from ._io import atomic_write
from .errors import ModelError, ValidationError
from .events import EVENT_NAMES
from .geometry import BoxSpec
from .laws import parse_law
from .render import render_svg
from .sampling import Configuration, make_rng, sample_hitting_process, sample_truncated_process

EXIT_OK, EXIT_INVALID, EXIT_MODEL = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _point(text):
    v = _floats(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return tuple(v)


def _model_flags(p, u_required=True):
    g = p.add_argument_group("model")
    g.add_argument("--alpha", type=float, help="Pareto tail exponent alpha (dimensionless, > 0)")
    g.add_argument("--law", help="major semi-axis law: pareto:A | pointmass:R | piecewise:T1:A1,T2:A2,... "
                                 "(thresholds in length units, first threshold 1)")
    g.add_argument("--u", type=float, required=u_required, help="center intensity (grains per unit area)")
    g.add_argument("--grain", choices=("ellipse", "disk"), default="ellipse",
                   help="grain shape: ellipse with semi-axes (R, 1) or disk of radius R")


def _geometry_flags(p):
    g = p.add_argument_group("geometry (length units)")
    g.add_argument("--l", type=float, help="box height l; the box B(l; k) is lk wide and l high")
    g.add_argument("--k", type=float, default=1.0, help="box aspect ratio k (width / height, dimensionless)")
    g.add_argument("--a", type=float, help="circuit scale a")
    g.add_argument("--eps", type=float, default=0.0, help="disk radius eps in [0, 1/2)")
    g.add_argument("--point", type=_point, default=(0.0, 0.0), help="target point / annulus center 'x,y'")
    g.add_argument("--r-in", type=float, help="annulus inner radius (default l)")
    g.add_argument("--r-out", type=float, help="annulus outer radius (default 8 r_in)")


def _run_flags(p, n_default=1000):
    g = p.add_argument_group("run")
    g.add_argument("--n", type=int, default=n_default, help="replicate count")
    g.add_argument("--seed", type=int, default=0, help="base seed (non-negative integer)")
    g.add_argument("--level", type=float, default=0.95, help="confidence level in (0, 1)")
    g.add_argument("--trunc-radius", type=float,
                   help="sample the far-field-truncated process with this center radius (length units)")
    g.add_argument("--allow-uncertified", action="store_true",
                   help="accept truncation error bounds above (1 - level)/10")


def _out_flag(p, what):
    p.add_argument("--out", required=True, help=f"output path ({what})")


def build_parser():
    top = _Parser(prog="ellipseperc", description="Poisson ellipse percolation laboratory.")
    sub = top.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="sample the grains meeting a box and write JSON")
    _model_flags(p)
    _geometry_flags(p)
    p.add_argument("--seed", type=int, default=0, help="seed (non-negative integer)")
    p.add_argument("--trunc-radius", type=float, help="truncated sampler center radius (length units)")
    _out_flag(p, "JSON configuration")

    p = sub.add_parser("render", help="render a JSON configuration as SVG")
    p.add_argument("--config", required=True, help="input JSON configuration path")
    p.add_argument("--pixels", type=int, default=800, help="image size of the longer side (pixels)")
    _out_flag(p, "SVG document")

    p = sub.add_parser("estimate", help="estimate an event probability")
    p.add_argument("--event", required=True, choices=EVENT_NAMES, help="event name")
    _model_flags(p)
    _geometry_flags(p)
    _run_flags(p)
    _out_flag(p, "CSV, or JSON when the path ends in .json")

    p = sub.add_parser("scan", help="estimate over a grid of (alpha, u, l, k)")
    p.add_argument("--event", required=True, choices=EVENT_NAMES, help="event name")
    p.add_argument("--alpha", type=_floats, help="comma-separated Pareto exponents")
    p.add_argument("--law", help="fixed law spec (instead of an alpha grid)")
    p.add_argument("--u", type=_floats, required=True, help="comma-separated intensities (per unit area)")
    p.add_argument("--l", type=_floats, required=True, help="comma-separated box heights (length units)")
    p.add_argument("--k", type=_floats, default=[1.0], help="comma-separated aspect ratios")
    p.add_argument("--grain", choices=("ellipse", "disk"), default="ellipse", help="grain shape")
    p.add_argument("--a", type=float, help="circuit scale a (length units)")
    p.add_argument("--eps", type=float, default=0.0, help="disk radius eps (length units)")
    p.add_argument("--point", type=_point, default=(0.0, 0.0), help="target point 'x,y'")
    _run_flags(p)
    _out_flag(p, "CSV, or JSON when the path ends in .json")

    p = sub.add_parser("lln", help="counts of grains covering B(0, eps) by center radius n")
    _model_flags(p)
    p.add_argument("--eps", type=float, default=0.0, help="disk radius eps in [0, 1/2) (length units)")
    p.add_argument("--n-list", type=_floats, required=True, help="comma-separated radii n (length units)")
    p.add_argument("--reps", type=int, default=200, help="replicates per radius")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    _out_flag(p, "CSV with columns n,mean,variance")

    p = sub.add_parser("corr", help="covariance of two events on shared configurations")
    p.add_argument("--event-a", required=True, choices=EVENT_NAMES, help="first event")
    p.add_argument("--event-b", required=True, choices=EVENT_NAMES, help="second event")
    _model_flags(p)
    _geometry_flags(p)
    p.add_argument("--point-b", type=_point, help="target point of the second event 'x,y' (default --point)")
    _run_flags(p)
    _out_flag(p, "JSON report")

    p = sub.add_parser("recursion", help="q_k recursion certificate")
    p.add_argument("--alpha", type=float, required=True, help="tail exponent alpha > 2")
    p.add_argument("--c7", type=float, default=2.0, help="recursion constant C7 > 0")
    p.add_argument("--kmax", type=int, default=200, help="last scale index k")
    p.add_argument("--u", type=float, help="intensity (default: the computed u0)")
    p.add_argument("--mode", choices=("crude", "envelope"), default="crude", help="seeding of q_k0")
    _out_flag(p, "JSON report")

    p = sub.add_parser("fractal", help="fractal percolation crossing frequency")
    p.add_argument("--p", type=float, required=True, help="retention probability in [0, 1]")
    p.add_argument("--N", type=int, default=2, help="subdivision factor per level (>= 2)")
    p.add_argument("--depth", type=int, default=6, help="number of levels (>= 1)")
    p.add_argument("--n", type=int, default=1000, help="replicate count")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--level", type=float, default=0.95, help="confidence level in (0, 1)")
    _out_flag(p, "JSON report")

    p = sub.add_parser("removal", help="one realization of the dyadic removal process on B(l; 2)")
    _model_flags(p)
    p.add_argument("--l", type=float, required=True, help="box height l > 2 (length units)")
    p.add_argument("--seed", type=int, default=0, help="seed")
    _out_flag(p, "JSON level fields")
    return top


# ------------------------------------------------------------- handlers


def _law(args):
    return parse_law(args.law, args.alpha)


def _params(args, point=None):
    return mc.EventParams(law=_law(args), u=args.u, grain_kind=args.grain, l=args.l, k=args.k,
                          a=args.a, eps=args.eps, point=point or args.point, r_in=args.r_in,
                          r_out=args.r_out, trunc_radius=args.trunc_radius,
                          allow_uncertified=args.allow_uncertified)


def _check_run(args):
    if args.n < 1:
        raise ValidationError(f"--n must be >= 1, got {args.n}")
    if args.seed < 0:
        raise ValidationError(f"--seed must be >= 0, got {args.seed}")
    if not 0 < args.level < 1:
        raise ValidationError(f"--level must lie in (0, 1), got {args.level}")


def _table(path, rows, extra=()):
    if str(path).endswith(".json"):
        return mc.rows_to_json(rows)
    return mc.rows_to_csv(rows, extra)


def cmd_sample(args):
    if args.l is None:
        raise ValidationError("--l is required")
    window = BoxSpec(args.l, args.k)
    rng = make_rng(args.seed)
    if args.trunc_radius is not None:
        cfg, _ = sample_truncated_process(window, args.u, _law(args), args.grain, args.trunc_radius, rng, args.seed)
        cfg.seed = args.seed
    else:
        cfg = sample_hitting_process(window, args.u, _law(args), args.grain, rng, seed=args.seed)
    atomic_write(args.out, cfg.to_json())


def cmd_render(args):
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = Configuration.from_json(fh.read())
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read configuration {args.config!r}: {exc}") from None
    render_svg(cfg, args.out, pixels=args.pixels)


def cmd_estimate(args):
    _check_run(args)
    res = mc.estimate(args.event, _params(args), args.n, args.seed, args.level)
    atomic_write(args.out, _table(args.out, [res.row()]))


def cmd_scan(args):
    _check_run(args)
    if args.law is None and not args.alpha:
        raise ValidationError("either --alpha (grid) or --law is required")
    laws = [parse_law(args.law)] if args.law else [parse_law(None, a) for a in args.alpha]
    rows = []
    i = 0
    for law in laws:
        for u in args.u:
            for l in args.l:
                for k in args.k:
                    seed = args.seed + i
                    i += 1
                    p = mc.EventParams(law=law, u=u, grain_kind=args.grain, l=l, k=k, a=args.a, eps=args.eps,
                                       point=args.point, trunc_radius=args.trunc_radius,
                                       allow_uncertified=args.allow_uncertified)
                    try:
                        row = mc.estimate(args.event, p, args.n, seed, args.level).row()
                        row["error"] = ""
                    except (ValidationError, ModelError) as exc:
                        row = mc.EstimateResult(args.event, p.record(), args.n, 0, math.nan,
                                                (math.nan, math.nan), args.level, seed).row()
                        row.update(n="", successes="", phat="", ci_lo="", ci_hi="", error=str(exc))
                    rows.append(row)
    atomic_write(args.out, _table(args.out, rows, ("error",)))


def cmd_lln(args):
    if args.reps < 2:
        raise ValidationError(f"--reps must be >= 2, got {args.reps}")
    if any(n <= 0 for n in args.n_list):
        raise ValidationError("--n-list radii must be > 0")
    table = mc.lln_counts(args.eps, args.u, _law(args), args.n_list, args.reps, args.seed, args.grain)
    lines = ["n,mean,variance"] + [f"{n!r},{m!r},{v!r}" for n, m, v in table]
    atomic_write(args.out, "\n".join(lines) + "\n")


def cmd_corr(args):
    _check_run(args)
    pa = _params(args)
    pb = _params(args, args.point_b) if args.point_b else None
    cov, (lo, hi) = mc.covariance(args.event_a, args.event_b, pa, args.n, args.seed, pb, args.level)
    rep = {"event_a": args.event_a, "event_b": args.event_b, "params_a": pa.record(),
           "params_b": (pb or pa).record(), "n": args.n, "seed": args.seed, "level": args.level,
           "cov": cov, "ci": [lo, hi]}
    atomic_write(args.out, json.dumps(rep, indent=1) + "\n")


def cmd_recursion(args):
    eps, k0, u0 = ms.compute_k0_u0(args.c7, args.alpha)
    u = u0 if args.u is None else args.u
    ok = ms.verify_qk_bound(args.c7, args.alpha, u, eps, k0, args.kmax, mode=args.mode)
    rep = {"alpha": args.alpha, "C7": args.c7, "epsilon": eps, "k0": k0, "u0": u0, "u": u,
           "kmax": args.kmax, "mode": args.mode, "pass": ok}
    atomic_write(args.out, json.dumps(rep, indent=1) + "\n")


def cmd_fractal(args):
    if args.n < 1:
        raise ValidationError(f"--n must be >= 1, got {args.n}")
    hits = sum(ms.fractal_percolation(args.p, args.N, args.depth, make_rng(args.seed, r))[1]
               for r in range(args.n))
    lo, hi = mc.wilson_ci(hits, args.n, args.level)
    rep = {"p": args.p, "N": args.N, "depth": args.depth, "n": args.n, "seed": args.seed,
           "crossings": int(hits), "phat": hits / args.n, "ci": [lo, hi]}
    atomic_write(args.out, json.dumps(rep, indent=1) + "\n")


def cmd_removal(args):
    out = ms.removal_process(args.l, args.u, _law(args), make_rng(args.seed), args.grain)
    d = out.to_dict()
    d.update(seed=args.seed, structural_ok=out.structural_ok, coupling_ok=ms.coupling_holds(out))
    atomic_write(args.out, json.dumps(d, indent=1) + "\n")


HANDLERS = {"sample": cmd_sample, "render": cmd_render, "estimate": cmd_estimate, "scan": cmd_scan,
            "lln": cmd_lln, "corr": cmd_corr, "recursion": cmd_recursion, "fractal": cmd_fractal,
            "removal": cmd_removal}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        HANDLERS[args.cmd](args)
    except SystemExit as exc:          # --help
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ModelError as exc:
        print(f"model error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
