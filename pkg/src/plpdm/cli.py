"""Command-line entry point: ``plpdm <command> [flags]``.

Machine-readable results go to stdout as JSON; diagnostics go to stderr.
Exit status is 0 on success, 1 on domain errors or audit violations, and
2 on bad flags.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .cycle_search import SearchOptions, audit_many, find_attractor
from .map_core import Params
from .scan import GridSpec, export, label_components, scan_grid
from .semiconj import phi, type_of
from .symbolic import Itinerary, orbit_itinerary
from .tongue_geometry import (
    AmbiguousBoundary,
    BoundaryQuery,
    boundary_a,
    boundary_candidates,
    seed_tongue,
)


class DomainError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _params(args) -> Params:
    try:
        return Params.of(args.a, args.b)
    except ValueError as e:
        raise DomainError(str(e)) from e


def _opts(args) -> SearchOptions:
    mp = getattr(args, "max_period", None) or 64
    return SearchOptions(max_period=mp, detect_window=max(256, mp + 1))


def cmd_scan(args) -> int:
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    bad = [f for f in formats if f not in ("ppm", "csv", "json")]
    if bad:
        raise DomainError(f"unknown format(s): {', '.join(bad)}")
    spec = GridSpec(args.a0, args.a1, args.b0, args.b1, args.na, args.nb)
    grid = scan_grid(spec, _opts(args), workers=args.workers)
    comps = label_components(grid)
    written = [export(grid, comps, f, f"{args.out}.{f}") for f in formats]
    _emit({"files": written, "components": len(comps)})
    return 0


def cmd_cycle(args) -> int:
    _emit(find_attractor(_params(args), _opts(args)).to_dict())
    return 0


def cmd_itinerary(args) -> int:
    if args.n < 0:
        raise DomainError("--n must be non-negative")
    itin, hits = orbit_itinerary(_params(args), args.x, args.n)
    _emit({"itinerary": str(itin), "break_point_hits": hits})
    return 0


def cmd_type(args) -> int:
    p = _params(args)
    rep = find_attractor(p, _opts(args))
    if rep.cycle is None:
        sys.stdout.write("none\n")
        return 0
    t = type_of(p, rep.cycle)
    _emit({"type": str(t), **t.to_dict()})
    return 0


def cmd_boundary(args) -> int:
    try:
        itin = Itinerary.parse(args.itinerary)
    except ValueError as e:
        raise DomainError(str(e)) from e
    try:
        res = boundary_a(BoundaryQuery(args.b, itin, args.side, args.near))
    except AmbiguousBoundary as e:
        print(f"plpdm: {e}", file=sys.stderr)
        _emit({"candidates": [r.to_dict() for r in boundary_candidates(args.b, itin, args.side)]})
        return 0
    _emit(res.to_dict())
    return 0


def cmd_seed(args) -> int:
    _emit(seed_tongue(args.period, args.b, x=args.x, near=args.near).to_dict())
    return 0


def cmd_phi(args) -> int:
    if args.tol <= 0:
        raise DomainError("--tol must be positive")
    p = _params(args)
    _emit(phi(p, args.x, args.tol).to_dict())
    return 0


def cmd_audit(args) -> int:
    if args.samples < 1:
        raise DomainError("--samples must be positive")
    rng = np.random.default_rng(args.seed)
    a = rng.random(args.samples)
    b = 0.5 + 0.5 * rng.random(args.samples)
    b[b <= 0.5] = np.nextafter(0.5, 1.0)
    reports = audit_many(a, b, args.max_period)
    bad = [r for r in reports if not r.consistent]
    for r in bad:
        print(f"plpdm: a={r.params.a!r} b={r.params.b!r}: {'; '.join(r.problems)}", file=sys.stderr)
    _emit({
        "samples": args.samples,
        "seed": args.seed,
        "max_period": args.max_period,
        "with_cycle": sum(1 for r in reports if r.count),
        "uniqueness_violations": sum(1 for r in reports if r.uniqueness_violation),
        "inconsistent": len(bad),
    })
    return 1 if bad else 0


def _side(s: str) -> str:
    s = s.lower()
    if s not in ("left", "right"):
        raise argparse.ArgumentTypeError("side must be left or right")
    return s


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plpdm", description="Dynamics of the PLPDM circle-map family.")
    sub = ap.add_subparsers(dest="command", required=True)

    def ab(p):
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("scan", help="rasterise a parameter rectangle")
    p.add_argument("--a0", type=float, required=True)
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--b0", type=float, required=True)
    p.add_argument("--b1", type=float, required=True)
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--format", default="ppm,csv,json")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-period", type=int, default=64)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("cycle", help="attracting cycle at (a, b)")
    ab(p)
    p.add_argument("--max-period", type=int, default=64)
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("itinerary", help="first n symbols of the itinerary of x")
    ab(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_itinerary)

    p = sub.add_parser("type", help="type k/(2^p-1) of the attractor")
    ab(p)
    p.add_argument("--max-period", type=int, default=64)
    p.set_defaults(func=cmd_type)

    p = sub.add_parser("boundary", help="a at which a component ends at height b")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--itinerary", required=True)
    p.add_argument("--side", type=_side, required=True)
    p.add_argument("--near", type=float, default=None, help="pick the component nearest this a")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("seed", help="construct a single-minus tongue slice")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--x", type=float, default=0.75)
    p.add_argument("--near", type=float, default=None)
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("phi", help="semiconjugacy value at x")
    ab(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("audit", help="uniqueness audit over random parameters")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-period", type=int, default=8)
    p.set_defaults(func=cmd_audit)
    return ap


def _glue_words(argv: list[str]) -> list[str]:
    """Attach a sign word to --itinerary so argparse does not read "-++" as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok == "--itinerary" and nxt and nxt.startswith("-") and set(nxt) <= {"+", "-"}:
            out.append(f"--itinerary={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_words(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (DomainError, ValueError, RuntimeError) as e:
        print(f"plpdm: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"plpdm: {e}", file=sys.stderr)
        return 1


run = main

if __name__ == "__main__":
    sys.exit(main())
