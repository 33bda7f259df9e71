"""Command-line entry point: ``torus-waves <subcommand> ...``.

Exit codes: 0 success, 1 domain error (JSON error object on stdout),
2 usage error.  ``--config FILE`` supplies flag defaults as a JSON object
keyed by option name; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .diagnostics import GapSpec, check_assumption_equi, diagnose, gap_circle_probe, scan
from .errors import TorusWavesError
from .geometry import (
    CurveSampler,
    curve_from_dict,
    default_curve,
    reparametrize_arclength,
    validate_condition1,
)
from .harness import (
    RunConfig,
    dumps_manifest,
    load_manifest,
    run_trials,
    save_manifest,
    universality_gap,
    write_counts_csv,
)
from .kacrice import predict
from .lattice import enumerate_lattice, save_lattice
from .wave import KINDS, CoefficientModel, sample_coefficients, trial_seed
from .zeros import count_zeros

SUBCOMMANDS = ("lattice", "curve", "zeros", "kacrice", "diagnose", "simulate", "compare")


class UsageError(Exception):
    pass


def _parse_params(text: str | None) -> dict:
    """JSON object, or comma-separated key=value pairs with numeric values."""
    if not text:
        return {}
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    out = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        if not _:
            raise UsageError(f"bad curve parameter {item!r}; expected key=value")
        val = val.strip()
        if ";" in val:
            out[key.strip()] = [float(v) for v in val.split(";")]
        else:
            out[key.strip()] = float(val)
    return out


def _curve(args, d: int):
    if getattr(args, "curve", None) is None:
        return default_curve(d)
    spec = curve_from_dict({"family": args.curve, "params": _parse_params(args.params)})
    return reparametrize_arclength(spec)


def _parse_gap(text: str) -> GapSpec:
    """``g0;g1;...;gr|N1,...,Nr`` with Python complex literals, or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        data = json.loads(text)
        gens = [complex(*g) if isinstance(g, list) else complex(g) for g in data["generators"]]
        return GapSpec(tuple(gens), tuple(data["dims"]))
    gens, _, dims = text.partition("|")
    return GapSpec(
        tuple(complex(g.strip().replace(" ", "")) for g in gens.split(";")),
        tuple(int(n) for n in dims.split(",")),
    )


# subcommands ----------------------------------------------------------------

def cmd_lattice(args):
    L = enumerate_lattice(args.d, args.m)
    out = L.to_dict()
    out["empty"] = L.empty
    if args.stats and not L.empty:
        rep = diagnose(args.d, args.m)
        out["stats"] = {k: v for k, v in rep.to_dict().items() if v is not None}
    if args.out:
        save_lattice(L, args.out)
    return out


def cmd_curve(args):
    if args.action != "validate":
        raise UsageError(f"unknown curve action {args.action!r}")
    d = 3 if args.family in ("helix", "product") else 2
    spec = curve_from_dict({"family": args.family, "params": _parse_params(args.params)})
    spec = reparametrize_arclength(spec)
    rep = validate_condition1(spec, lam=args.lam, N=args.N, alpha=args.alpha, c0=args.c0)
    out = rep.to_dict()
    out["curve"] = spec.to_dict()
    out["d"] = d
    return out


def cmd_zeros(args):
    L = enumerate_lattice(args.d, args.m)
    curve = _curve(args, args.d)
    model = CoefficientModel(args.dist)
    sampler = CurveSampler.for_level(curve, args.m, args.grid_factor)
    results = []
    for i in range(args.trials):
        s = sample_coefficients(model, L, trial_seed(args.seed, i))
        results.append(count_zeros(s, sampler, grid_factor=args.grid_factor).to_dict())
    out = results[0] if args.trials == 1 else {"trials": results}
    if args.out:
        Path(args.out).write_text(json.dumps(out, sort_keys=True))
    return out


def cmd_kacrice(args):
    L = enumerate_lattice(args.d, args.m)
    curve = _curve(args, args.d)
    out = predict(L, curve, variance=args.variance, quad_nodes=args.quad_nodes).to_dict()
    out["N"] = L.N
    if args.out:
        Path(args.out).write_text(json.dumps(out, sort_keys=True))
    return out


def cmd_diagnose(args):
    if args.scan_max:
        rows = scan(args.scan_max, args.d)
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[-1].keys()), extrasaction="ignore", restval="", lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        if args.out:
            Path(args.out).write_text(buf.getvalue())
        return {"_csv": buf.getvalue()}
    if args.m is None:
        raise UsageError("diagnose needs --m (or --scan-max)")
    curve = _curve(args, args.d)
    rep = diagnose(args.d, args.m, curve=curve, full=args.all, eps0=args.eps0)
    out = rep.to_dict()
    if args.all and args.d == 2 and rep.N:
        eq = check_assumption_equi(enumerate_lattice(args.d, args.m), eps0=args.eps0)
        out["equi"] = {k: v for k, v in eq.to_dict().items() if k != "counts"}
    if args.gap:
        Q = _parse_gap(args.gap)
        out["gap_probe"] = gap_circle_probe(Q, args.delta, args.eps)
        out["gap"] = {"rank": Q.rank, "volume": Q.volume, "delta": args.delta, "eps": args.eps}
    if args.out:
        Path(args.out).write_text(json.dumps(out, sort_keys=True))
    return out


def cmd_simulate(args):
    curve = _curve(args, args.d)
    cfg = RunConfig(
        d=args.d,
        m=args.m,
        curve=curve.to_dict(),
        model=CoefficientModel(args.dist).to_dict(),
        trials=args.trials,
        seed=args.seed,
        grid_factor=args.grid_factor,
        k_max=args.k_max,
    )
    rep = run_trials(cfg, workers=args.workers)
    if args.out:
        save_manifest(args.out, cfg, rep, timing=args.timing)
    if args.csv:
        write_counts_csv(args.csv, rep)
    return json.loads(dumps_manifest(cfg, rep, timing=args.timing))


def cmd_compare(args):
    cfg_a, a = load_manifest(args.a)
    cfg_b, b = load_manifest(args.b)
    gap, se = universality_gap(a, b, args.k, cfg_a, cfg_b)
    return {
        "k": args.k,
        "gap": gap,
        "combined_se": se,
        "z": gap / se if se > 0 else (0.0 if gap == 0 else math.inf),
        "within_3se": bool(gap <= 3 * se),
        "a": {"dist": cfg_a.model["kind"], "trials": a.trials},
        "b": {"dist": cfg_b.model["kind"], "trials": b.trials},
    }


# parser ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with default flag values")
    p.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    p.add_argument("--out", help="write the result to this file")


def _curve_flags(p):
    p.add_argument("--curve", help="curve family (circle, helix, product, segment, circle_warp)")
    p.add_argument("--params", help="curve parameters: JSON object or key=value,...")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torus-waves", description="Random eigenfunctions on flat tori.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")
    sub.required = True

    p = sub.add_parser("lattice", help="enumerate lattice points with |mu|^2 = m")
    _common(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("curve", help="validate a reference curve")
    _common(p)
    p.add_argument("action", choices=("validate",))
    p.add_argument("--family", required=True)
    p.add_argument("--params")
    p.add_argument("--lam", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--c0", type=float, default=1.0)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("zeros", help="count nodal intersections for seeded samples")
    _common(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--dist", choices=KINDS, default="gaussian")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-factor", type=float, default=32.0)
    _curve_flags(p)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("kacrice", help="Gaussian Kac-Rice predictions")
    _common(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--variance", action="store_true")
    p.add_argument("--quad-nodes", type=int, default=128)
    _curve_flags(p)
    p.set_defaults(func=cmd_kacrice)

    p = sub.add_parser("diagnose", help="arithmetic diagnostics of a lattice set")
    _common(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", type=int)
    p.add_argument("--all", action="store_true")
    p.add_argument("--eps0", type=float, default=0.1)
    p.add_argument("--gap", help="GAP as 'g0;g1;...|N1,...' or JSON")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--scan-max", type=int)
    _curve_flags(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("simulate", help="Monte Carlo run; writes a manifest")
    _common(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--dist", choices=KINDS, default="gaussian")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-factor", type=float, default=32.0)
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--workers", type=int)
    p.add_argument("--csv", help="also write per-trial counts as CSV")
    p.add_argument("--timing", action="store_true", help="include wall time in the manifest")
    _curve_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="moment gap between two manifests")
    _common(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_compare)
    return ap


def _parse(argv):
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in SUBCOMMANDS), None)
    if known.config and command:
        try:
            cfg = json.loads(Path(known.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            ap.error(f"cannot read config {known.config}: {exc}")
        if not isinstance(cfg, dict):
            ap.error("config file must hold a JSON object")
        sub = ap._subparsers._group_actions[0].choices[command]
        known_dests = {a.dest for a in sub._actions}
        defaults = {}
        for key, val in cfg.items():
            dest = key.replace("-", "_")
            if dest not in known_dests or dest in ("config", "help"):
                ap.error(f"unknown option {key!r} in config file")
            defaults[dest] = val
        sub.set_defaults(**defaults)
        for action in sub._actions:
            if action.dest in defaults:
                action.required = False
    return ap, ap.parse_args(argv)


def _render(out, fmt: str) -> str:
    if isinstance(out, dict) and "_csv" in out:
        return out["_csv"].rstrip("\n")
    if fmt == "pretty":
        return "\n".join(f"{k}: {json.dumps(v)}" for k, v in out.items())
    if fmt == "csv":
        buf = io.StringIO()
        flat = {k: v for k, v in out.items() if not isinstance(v, (list, dict))}
        w = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
        w.writeheader()
        w.writerow(flat)
        return buf.getvalue().rstrip("\n")
    return json.dumps(out, sort_keys=True)


def main(argv=None) -> int:
    ap, args = _parse(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        out = args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"torus-waves: error: {exc}", file=sys.stderr)
        return 2
    except (TorusWavesError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    print(_render(out, args.format))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
