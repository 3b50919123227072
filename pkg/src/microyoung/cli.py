"""Command line: ``microyoung <command> ...``; JSON on stdout, optional report files.

Exit codes: 0 pass, 2 not admissible (or a failed check), 3 inconclusive,
4 input error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, grids
from .catalog import KERNEL_IDS, parse_kernel
from .config import RunConfig
from .errors import DomainMismatch, MicroYoungError, NotAdmissible, UnknownKernel
from .kernels import Region, pair_scaled

EXIT_OK, EXIT_NOT_ADMISSIBLE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 2, 3, 4


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class Reporter:
    """Single writer for the JSON report and any CSV scaling tables."""

    def __init__(self, command, config: RunConfig, kernels, out=None):
        self.command = command
        self.config = config
        self.kernels = list(kernels)
        self.out = out if out is not None else sys.stdout
        self.tables = {}

    def table(self, name, rows, header=("scale", "magnitude")):
        self.tables[name] = (tuple(header), [tuple(r) for r in rows])

    def document(self, result):
        return {"command": self.command, "kernels": self.kernels,
                "config": self.config.to_dict(), "result": _jsonable(result),
                "meta": {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
                         "version": __version__}}

    def emit(self, result):
        doc = self.document(result)
        text = json.dumps(doc, sort_keys=True, indent=2)
        self.out.write(text + "\n")
        if self.config.output_dir:
            d = Path(self.config.output_dir)
            d.mkdir(parents=True, exist_ok=True)
            stem = self.command.replace(" ", "-")
            (d / f"{stem}.json").write_text(text + "\n")
            for name, (header, rows) in self.tables.items():
                with open(d / f"{stem}-{name}.csv", "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(header)
                    w.writerows(rows)
        return doc


def _samples_table(report):
    # samples are (log scale, log magnitude)
    return [(math.exp(a), math.exp(b)) for a, b in report.samples]


def _region(text, dim):
    if text is None:
        return None
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"--region expects 'lo,hi', got {text!r}") from exc
    return Region.box([lo] * dim, [hi] * dim)


def _point(text, dim):
    vals = [float(v) for v in str(text).split(",")]
    if len(vals) == 1:
        vals = vals * dim
    if len(vals) != dim:
        raise InputError(f"point {text!r} needs {dim} coordinates")
    return vals[0] if dim == 1 else tuple(vals)


# --------------------------------------------------------------------------
# commands


def cmd_regularity(args, cfg):
    from .regularity import estimate_holder_exponent, estimate_local_sobolev
    u = parse_kernel(args.kernel, args.dim)
    rep = estimate_holder_exponent(u, _region(args.region, args.dim), cfg.scales)
    result = {"holder": rep.to_dict(), "smooth": rep.smooth}
    if args.sobolev is not None:
        result["local_sobolev"] = estimate_local_sobolev(u, _point(args.sobolev, args.dim)).to_dict()
    r = Reporter("regularity", cfg, [args.kernel])
    r.table("holder", _samples_table(rep))
    r.emit(result)
    return EXIT_OK


def cmd_beta_star(args, cfg):
    from .regularity import estimate_beta_star
    u = parse_kernel(args.kernel, args.dim)
    rep = estimate_beta_star(u, _region(args.region, args.dim), cfg.p_samples, cfg.scales)
    r = Reporter("beta-star", cfg, [args.kernel])
    r.table("beta_star", _samples_table(rep))
    r.emit(rep.to_dict())
    return EXIT_OK


def cmd_wavefront(args, cfg):
    from .wavefront import wavefront_set
    u = parse_kernel(args.kernel, args.dim)
    points = [_point(p, args.dim) for p in args.at]
    rep = wavefront_set(u, points, args.s)
    r = Reporter("wavefront", cfg, [args.kernel])
    rows = []
    for e in rep.entries:
        js = e.profile.shells
        sums = e.profile.shell_sums(args.s if args.s is not None else 0.0)
        rows += [(" ".join(map(str, e.x)), " ".join(f"{v:g}" for v in e.direction), 2.0 ** j, s)
                 for j, s in zip(js, sums)]
    r.table("shells", rows, ("x", "direction", "scale", "magnitude"))
    r.emit(rep.to_dict())
    return EXIT_OK


def _wavefront_criterion(f, g):
    from .wavefront import pairwise_product_criterion
    common = sorted({tuple(p) for p in (q.tolist() for q in f.singular_points())}
                    & {tuple(p) for p in (q.tolist() for q in g.singular_points())})
    if not common:
        return None
    return pairwise_product_criterion(f, g, [c if f.dim > 1 else c[0] for c in common])


def cmd_product(args, cfg):
    from .product import check_young_microlocal, young_product
    f, g = parse_kernel(args.f, args.dim), parse_kernel(args.g, args.dim)
    adm = check_young_microlocal(f, g, margin=cfg.margin)
    result = {"admissibility": adm.to_dict()}
    code = EXIT_OK
    if adm.decision == "Inconclusive":
        code = EXIT_INCONCLUSIVE
    elif not adm.admissible:
        code = EXIT_NOT_ADMISSIBLE
        if not (f.singular_everywhere or g.singular_everywhere):
            crit = _wavefront_criterion(f, g)
            if crit is not None:
                result["wavefront"] = crit.to_dict()
                if crit.decision == "fail":
                    adm.reason = "s1*+s2* < 0"
        result["admissibility"] = adm.to_dict()
        result["reason"] = adm.reason
    if args.action == "apply" and adm.admissible:
        from .testfn import plain_dictionary
        prod = young_product(f, g, adm)
        pts = sorted({tuple(p.tolist()) for p in prod.singular_points()}) or [(0.0,) * f.dim]
        pairings = []
        for p in pts:
            for phi in plain_dictionary(f.dim)[:2]:
                x = p[0] if f.dim == 1 else p
                for lam in (0.5, 0.25):
                    pairings.append({"x": list(p), "test": phi.label, "scale": lam,
                                     "value": pair_scaled(prod, phi, x, lam)})
        result["product"] = {"label": prod.label, "pairings": pairings}
    r = Reporter(f"product {args.action}", cfg, [args.f, args.g])
    r.table("ledger", [(e.radius, e.margin) for e in adm.ledger], ("scale", "magnitude"))
    r.emit(result)
    return code


def _coeffs(items):
    out = {}
    for item in items or []:
        key, _, val = item.partition("=")
        if not key.startswith("a") or not val:
            raise InputError(f"--coeff expects a<index>=<value>, e.g. a0=1.5, got {item!r}")
        out[key[1:] or "0"] = float(val)
    return out


def cmd_extend(args, cfg):
    from .extension import extend, multiply_and_extend
    t = parse_kernel(args.kernel, args.dim)
    coeffs = _coeffs(args.coeff)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.times:
            g = parse_kernel(args.times, args.dim)
            res = multiply_and_extend(t, g, coeffs)
            result = res.to_dict()
            fam = res.family
        else:
            fam = extend(t, _point(args.at, args.dim), coeffs)
            result = fam.to_dict()
    result["warnings"] = [str(w.message) for w in caught if w.category.__name__ != "DeprecationWarning"]
    r = Reporter("extend", cfg, [args.kernel] + ([args.times] if args.times else []))
    if fam is not None:
        r.table("scaling_degree", [(math.exp(a), math.exp(b)) for a, b in fam.sd.samples])
    r.emit(result)
    return EXIT_OK


def cmd_germ(args, cfg):
    from .germs import (check_coherence, product_germ, reconstruct_product_germ,
                        verify_reconstruction_bound)
    f, g = parse_kernel(args.f, args.dim), parse_kernel(args.g, args.dim)
    F = product_germ(f, g)
    r = Reporter(f"germ {args.action}", cfg, [args.f, args.g])
    code = EXIT_OK
    if args.action == "build":
        from .testfn import plain_dictionary
        phi = plain_dictionary(f.dim)[0]
        xs = np.linspace(-0.5, 0.5, 5)
        vals = [{"x": float(x), "F_x(phi)": pair_scaled(F(x), phi, 0.0 if f.dim == 1 else (0.0,) * f.dim, 0.5)}
                for x in xs]
        result = {"germ": F.to_dict(), "values": vals}
    elif args.action == "check":
        rep = check_coherence(F, seed=cfg.seed)
        result = rep.to_dict()
        code = EXIT_OK if rep.passed else EXIT_NOT_ADMISSIBLE
    else:
        RF = reconstruct_product_germ(F)
        rep = verify_reconstruction_bound(F, RF, seed=cfg.seed)
        result = {"reconstruction": RF.label, "bound": rep.to_dict()}
        r.table("bound", list(zip(rep.scales, rep.magnitudes)))
        code = EXIT_OK if rep.passed else EXIT_NOT_ADMISSIBLE
    r.emit(result)
    return code


def cmd_suite(args, cfg):
    from .suite import format_table, run_suite
    results = run_suite()
    print(format_table(results), file=sys.stderr)
    Reporter("suite", cfg, []).emit({"checks": [x.to_dict() for x in results],
                                     "all_pass": all(x.passed for x in results)})
    return EXIT_OK if all(x.passed for x in results) else EXIT_NOT_ADMISSIBLE


# --------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="microyoung", description="Regularity exponents and products of distributions.",
                epilog="kernel ids: " + ", ".join(KERNEL_IDS) + "; join terms with '+'.")
    p.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--dim", type=int, default=1, choices=(1, 2))
    common.add_argument("--config", help="JSON file with run configuration")
    common.add_argument("--output-dir", help="directory for the JSON report and CSV tables (default: cwd; empty: stdout only)")
    common.add_argument("--n-min", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--seed", type=int)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("regularity", parents=[common], help="Hoelder exponent")
    s.add_argument("kernel")
    s.add_argument("--region", help="box 'lo,hi' applied on every axis")
    s.add_argument("--sobolev", metavar="X", help="also estimate the local Sobolev exponent at X")
    s.set_defaults(func=cmd_regularity)

    s = sub.add_parser("beta-star", parents=[common], help="improved product exponent")
    s.add_argument("kernel")
    s.add_argument("--region")
    s.set_defaults(func=cmd_beta_star)

    s = sub.add_parser("wavefront", parents=[common], help="critical Sobolev index per direction")
    s.add_argument("kernel")
    s.add_argument("--at", nargs="+", default=["0"])
    s.add_argument("--s", type=float, help="report the flagged set at this Sobolev index")
    s.set_defaults(func=cmd_wavefront)

    s = sub.add_parser("product", parents=[common], help="product admissibility and construction")
    s.add_argument("action", choices=("check", "apply"))
    s.add_argument("f")
    s.add_argument("g")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("extend", parents=[common], help="extension across a point")
    s.add_argument("kernel")
    s.add_argument("--at", default="0")
    s.add_argument("--coeff", action="append", help="free coefficient, e.g. a0=1.5")
    s.add_argument("--times", metavar="KERNEL", help="multiply by this kernel first")
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("germ", parents=[common], help="product germs")
    s.add_argument("action", choices=("build", "check", "reconstruct"))
    s.add_argument("f")
    s.add_argument("g")
    s.set_defaults(func=cmd_germ)

    for name in ("suite", "paper-suite"):
        s = sub.add_parser(name, parents=[common], help="reference checks with a pass/fail table")
        s.set_defaults(func=cmd_suite)
    return p


def _config(args):
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    updates = {k: v for k, v in (("n_min", args.n_min), ("n_max", args.n_max),
                                 ("seed", args.seed), ("output_dir", args.output_dir))
               if v is not None}
    if updates:
        cfg = RunConfig.from_dict({**cfg.to_dict(), **updates,
                                   "p_samples": list(cfg.p_samples)})
    grids.GRID_SIZE[1], grids.GRID_SIZE[2] = cfg.grid_1d, cfg.grid_2d
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (InputError, UnknownKernel, DomainMismatch, ValueError, FileNotFoundError) as exc:
        print(json.dumps({"error": type(exc).__name__, "reason": str(exc)}, sort_keys=True))
        return EXIT_INPUT
    except NotAdmissible as exc:
        print(json.dumps({"error": "NotAdmissible", "reason": str(exc)}, sort_keys=True))
        return EXIT_NOT_ADMISSIBLE
    except MicroYoungError as exc:
        print(json.dumps({"error": type(exc).__name__, "reason": str(exc)}, sort_keys=True))
        return EXIT_NOT_ADMISSIBLE


if __name__ == "__main__":
    sys.exit(main())
