"""Command-line front end: ``ftc <command> ...``.

Output is JSON (or CSV for ``simulate``) unless ``--human`` asks for a
table.  Exit codes: 0 success, 1 a negative validation result, 2 an error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .complex import CellComplex, UnitCellTemplate, euler_characteristic, instantiate, validate_fusion_complex
from .errors import FTCError, NoCrossingInGrid
from .generators.catalog import catalog, catalog_names
from .generators.dsymbol import parse_dsymbol, read_dsymbol_file
from .generators.interchange import dumps, parse_interchange

DEFAULT_SEED = 0
DEFAULT_DIMS = (2, 2, 2)


class CLIError(FTCError):
    pass


# ------------------------------------------------------------------ helpers


def _dims(text):
    parts = [int(x) for x in str(text).replace("x", ",").split(",") if x.strip()]
    if len(parts) == 1:
        parts *= 3
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("dims must be L or Lx,Ly,Lz")
    return tuple(parts)


def _load(args) -> CellComplex:
    """Complex named by ``--catalog`` or the positional source (path or name)."""
    name = getattr(args, "catalog", None)
    src = getattr(args, "source", None)
    if name is None and src is None:
        raise CLIError("give a catalog name or an interchange file")
    if name is None and not os.path.exists(src):
        if src in catalog_names():
            name = src
        else:
            raise CLIError(f"no such file or catalog complex: {src}")
    if name is not None:
        obj: UnitCellTemplate | CellComplex = catalog(name)
    else:
        with open(src, "rb") as fh:
            obj = parse_interchange(fh.read())
    if isinstance(obj, UnitCellTemplate):
        return instantiate(obj, args.dims)
    return obj


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, default=str) + "\n"


def _report_doc(rep, limit=20) -> dict:
    info = {k: v for k, v in rep.info.items() if k != "coloring"}
    return {
        "valid": rep.valid,
        "undecided": rep.undecided,
        "violations": [list(v) for v in rep.violations[:limit]],
        "n_violations": len(rep.violations),
        "info": info,
    }


def _add_source(p, dims=True):
    p.add_argument("source", nargs="?", help="interchange file or catalog name")
    p.add_argument("--catalog", metavar="NAME", help="built-in complex")
    if dims:
        p.add_argument("--dims", type=_dims, default=DEFAULT_DIMS, help="unit cells per side (default 2)")


# ----------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    K = _load(args)
    if args.rule == "fusion":
        rep = validate_fusion_complex(K)
    elif args.rule == "subsystem":
        from .subsystem import validate_subsystem_complex

        rep = validate_subsystem_complex(K)
    else:
        from .color import validate_color_complex

        rep = validate_color_complex(K)
    doc = _report_doc(rep)
    doc.update(name=K.name, rule=args.rule)
    if args.human:
        state = "undecided" if rep.undecided else ("valid" if rep.valid else "invalid")
        print(f"{K.name}: {state} ({args.rule})")
        for v in rep.violations[:20]:
            print(f"  {v[1]}: {v[2]}")
    else:
        sys.stdout.write(_json(doc))
    return 0 if rep.valid else 1


def describe(K: CellComplex) -> dict:
    from .syndrome import check_profiles, format_profile

    C, R = check_profiles(K)
    return {
        "name": K.name,
        "dims": list(K.dims) if K.dims else None,
        "counts": list(K.counts),
        "euler": euler_characteristic(K),
        "C": format_profile(C),
        "R": format_profile(R),
    }


def cmd_describe(args) -> int:
    doc = describe(_load(args))
    if args.human:
        print(f"{doc['name']}  C: {doc['C']}; R: {doc['R']}")
        print(f"  counts (V, E, F, C): {tuple(doc['counts'])}  euler: {doc['euler']}")
    else:
        sys.stdout.write(_json(doc))
    return 0


def cmd_triplet(args) -> int:
    from .syndrome import derive_triplet, reinterpret_as_fusion_complex

    t = derive_triplet(_load(args))
    K = reinterpret_as_fusion_complex(t, args.emit)
    _emit(dumps(K, indent=None) + "\n", args.out)
    return 0


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FTC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CLIError(f"FTC_SEED is not an integer: {env!r}") from None
    return None


def cmd_simulate(args) -> int:
    from .decode.sim import SimConfig, default_jobs, run_montecarlo
    from .decode.threshold import estimate_threshold

    with open(args.config) as fh:
        text = fh.read()
    cfg = SimConfig.from_json(text, seed=_seed(args), trials=args.trials)
    jobs = args.jobs if args.jobs else default_jobs()
    res = run_montecarlo(cfg, jobs=jobs)
    _emit(res.to_csv(), args.out)
    summary = {}
    for ctype in cfg.check_types:
        sub = res.select(ctype)
        try:
            est = estimate_threshold(sub, resamples=args.resamples, seed=cfg.seed)
            summary[ctype] = {"p_star": est.p_star, "ci": list(est.ci), "crossings": list(est.crossings)}
        except NoCrossingInGrid as exc:
            summary[ctype] = {"p_star": None, "reason": str(exc)}
    # the CSV owns stdout unless it went to a file
    stream = sys.stdout if args.out else sys.stderr
    if args.human:
        for ctype, s in summary.items():
            if s["p_star"] is None:
                print(f"{cfg.complex} {ctype}: no threshold ({s['reason']})", file=stream)
            else:
                lo, hi = s["ci"]
                print(f"{cfg.complex} {ctype}: p* = {s['p_star']:.5g}  95% CI [{lo:.5g}, {hi:.5g}]", file=stream)
    else:
        stream.write(_json({"complex": cfg.complex, "thresholds": summary}))
    return 0


def _family(doc, where):
    from .generators.arrangement import PlaneFamily

    try:
        normal = tuple(int(x) for x in doc["normal"])
        if "offsets" in doc:
            return PlaneFamily(normal, tuple(Fraction(str(o)) for o in doc["offsets"]))
        return PlaneFamily.uniform(normal, int(doc["count"]), Fraction(str(doc.get("shift", 0))))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise CLIError(f"{where}: bad plane family ({exc})") from None


def load_arrangement_spec(text: str):
    """``(families, periods, name, dim)`` from an arrangement spec document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"spec is not JSON: {exc}") from None
    if not isinstance(doc, dict) or "families" not in doc or "periods" not in doc:
        raise CLIError("spec needs 'families' and 'periods'")
    fams = [_family(f, f"families[{i}]") for i, f in enumerate(doc["families"])]
    periods = tuple(int(x) for x in doc["periods"])
    return fams, periods, doc.get("name", "arrangement"), int(doc.get("dim", len(periods)))


def cmd_generate(args) -> int:
    from .generators.arrangement import line_arrangement, plane_arrangement

    with open(args.spec) as fh:
        fams, periods, name, dim = load_arrangement_spec(fh.read())
    if dim == 2:
        K = line_arrangement(fams, periods, name)
    else:
        K = plane_arrangement(fams, periods, name)
    _emit(dumps(K) + "\n", args.out)
    return 0


def cmd_catalog(args) -> int:
    if args.action == "list":
        if args.human:
            for n in catalog_names():
                print(n)
        else:
            sys.stdout.write(_json(catalog_names()))
        return 0
    if not args.name:
        raise CLIError("catalog export needs a name")
    obj = catalog(args.name)
    if args.dims is not None:
        obj = instantiate(obj, args.dims)
    _emit(dumps(obj) + "\n", args.out)
    return 0


def cmd_export_syndrome(args) -> int:
    from .complex import bicolor_cells
    from .syndrome import build_syndrome_graphs, export_edge_list, export_membranes, logical_membranes

    K = _load(args)
    col = bicolor_cells(K)
    gx, gz = build_syndrome_graphs(K, col)
    g = gx if args.type == "X" else gz
    _emit(export_edge_list(g), args.out)
    if args.membranes:
        with open(args.membranes, "w") as fh:
            fh.write(export_membranes(logical_membranes(K, col, args.type, g)))
    return 0


def cmd_dsymbol(args) -> int:
    if args.file:
        recs = read_dsymbol_file(args.file)
    elif args.text:
        recs = [parse_dsymbol(t) for t in args.text]
    else:
        raise CLIError("give D-symbol strings or --file")
    docs = [{"size": r.size, "dim": r.dim, "ops": r.op_lists, "m": r.m_lists, "text": r.text} for r in recs]
    sys.stdout.write(_json(docs))
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ftc", description="Fusion complexes, networks and threshold estimates.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--human", action="store_true", help="print tables instead of JSON")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a complex against a definition")
    _add_source(p)
    p.add_argument("--rule", choices=("fusion", "subsystem", "color"), default="fusion")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("describe", parents=[common], help="check-degree and resource-size profiles")
    _add_source(p)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("triplet", parents=[common], help="reinterpret a triplet member as a fusion complex")
    _add_source(p)
    p.add_argument("--emit", choices=("R", "X", "Z"), required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_triplet)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo logical error rates")
    p.add_argument("config", help="JSON simulation config")
    p.add_argument("--out", help="CSV output file (default stdout)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--seed", type=int, default=None, help="master seed (else FTC_SEED, else the config)")
    p.add_argument("--trials", type=int, default=None, help="override trials per point")
    p.add_argument("--resamples", type=int, default=1000, help="bootstrap resamples for the threshold CI")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", parents=[common], help="complex from a periodic plane arrangement")
    p.add_argument("spec", help="JSON arrangement spec")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("catalog", parents=[common], help="list or export built-in complexes")
    p.add_argument("action", choices=("list", "export"))
    p.add_argument("name", nargs="?")
    p.add_argument("--dims", type=_dims, default=None, help="instantiate before export")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("export-syndrome", parents=[common], help="syndrome graph edge list")
    _add_source(p)
    p.add_argument("--type", choices=("X", "Z"), default="X")
    p.add_argument("--out", help="edge list file (default stdout)")
    p.add_argument("--membranes", help="also write logical membranes here")
    p.set_defaults(func=cmd_export_syndrome)

    p = sub.add_parser("dsymbol", parents=[common], help="parse D-symbol strings")
    p.add_argument("text", nargs="*")
    p.add_argument("--file", help="one D-symbol per line")
    p.set_defaults(func=cmd_dsymbol)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FTCError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
