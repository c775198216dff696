"""Command-line front end.

Exit codes: 0 on completion (unresolved verdicts included), 2 for a
malformed spec or bad arguments, 3 when a truncation budget cannot
certify the requested tolerance, 1 for I/O failures.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import DomainError, SpecError, TruncationBudgetExceeded
from .render import render
from .report import analyze, run_suite, with_budget
from .serialize import load_spec
from .sublevel import RefinementPolicy

OUT_ENV = "ONECOMP_OUT_DIR"
EXIT_SPEC = 2
EXIT_BUDGET = 3


def _out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "onecomp-out"))


def _eta_list(text: str) -> list[float]:
    if not text.strip():
        return []
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    for v in vals:
        if not 0.0 < v < 1.0:
            raise argparse.ArgumentTypeError(f"level {v} is not in (0, 1)")
    return vals


def _policy(args) -> RefinementPolicy:
    p = RefinementPolicy(workers=args.workers)
    if args.tol is not None:
        p = replace(p, tol=args.tol, max_tol=max(p.max_tol, args.tol))
    if args.grid_levels is not None:
        p = p.truncated(args.grid_levels)
    if args.r_max is not None:
        p = p.capped(args.r_max)
    return p


def _common(sp: argparse.ArgumentParser) -> None:
    d = RefinementPolicy()
    sp.add_argument("--grid-levels", type=int, default=None, metavar="K",
                    help=f"refinement levels to use (default: all {d.levels})")
    sp.add_argument("--r-max", type=float, default=None, metavar="X",
                    help=f"cap on the sampled radius (default schedule: {', '.join(map(str, d.r_max_schedule))})")
    sp.add_argument("--budget", type=int, default=None, metavar="N",
                    help="index budget for every zero sequence (default: the generator's own)")
    sp.add_argument("--tol", type=float, default=None, metavar="T",
                    help=f"truncation tolerance in log scale (default: {d.tol:g}, falling back to {d.max_tol:g})")
    sp.add_argument("--workers", type=int, default=1, help="threads for cell evaluation")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    ap = argparse.ArgumentParser(
        prog="onecomp",
        description="Connectivity of sublevel sets of inner functions.",
        epilog=f"Default output directory: ${OUT_ENV} or ./onecomp-out.",
        formatter_class=fmt,
    )
    ap.add_argument("--version", action="version", version=f"onecomp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="write a JSON analysis report", formatter_class=fmt)
    a.add_argument("--spec", required=True, help="function spec (JSON)")
    a.add_argument("--eta", type=_eta_list, default=None,
                   help="comma-separated levels; empty string for none (default: levels stored in the spec)")
    a.add_argument("--out", default=None, help=f"report path (default: ${OUT_ENV}/<name>.json)")
    a.add_argument("--threshold", action="store_true", help="also bisect for the connectivity flip")
    _common(a)

    r = sub.add_parser("render", help="draw nested sublevel sets", formatter_class=fmt)
    r.add_argument("--spec", required=True, help="function spec (JSON)")
    r.add_argument("--eta", type=_eta_list, default=None, help="comma-separated levels (default: from the spec)")
    r.add_argument("--format", choices=("ppm", "svg"), default="ppm")
    r.add_argument("--size", type=int, default=256, help="image width and height in pixels")
    r.add_argument("--out", default=None, help=f"image path (default: ${OUT_ENV}/<name>.<format>)")
    _common(r)

    s = sub.add_parser("paper-suite", help="run every stock experiment", formatter_class=fmt)
    s.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV}/suite)")
    _common(s)
    return ap


def _load(args):
    doc = load_spec(args.spec)
    if args.budget is not None:
        doc.function = with_budget(doc.function, args.budget)
    return doc


def _cmd_analyze(args) -> int:
    doc = _load(args)
    rep = analyze(doc, etas=args.eta, policy=_policy(args), threshold=args.threshold)
    out = Path(args.out) if args.out else _out_dir() / f"{doc.name}.json"
    rep.write(out)
    verdicts = ", ".join(f"eta={v['eta']:.6g} {v['verdict']}" for v in rep.verdicts)
    print(f"{out}: {verdicts or 'no levels'}")
    return 0


def _cmd_render(args) -> int:
    doc = _load(args)
    etas = doc.eta if args.eta is None else args.eta
    out = Path(args.out) if args.out else _out_dir() / f"{doc.name}.{args.format}"
    render(doc.function, etas, out, args.format, args.size, _policy(args))
    print(out)
    return 0


def _cmd_suite(args) -> int:
    if args.budget is not None:
        print("--budget is ignored here; stock experiments fix their own truncations", file=sys.stderr)
    out = Path(args.out) if args.out else _out_dir() / "suite"
    summary = run_suite(out, _policy(args))
    for row in summary["rows"]:
        print(f"{row['status']:>10}  {row['row']}")
    for name, err in summary["failures"].items():
        print(f"    failed  {name}: {err}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {"analyze": _cmd_analyze, "render": _cmd_render, "paper-suite": _cmd_suite}
    try:
        return handlers[args.command](args)
    except SpecError as exc:
        print(f"onecomp: invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except TruncationBudgetExceeded as exc:
        print(f"onecomp: truncation budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DomainError as exc:
        print(f"onecomp: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"onecomp: {exc}", file=sys.stderr)
        return 1
