"""Command-line interface: ``curvepoints <subcommand> ...``.

Exit status: 0 success, 2 invalid configuration, 3 a theorem hypothesis
failed, 4 guard-band ambiguity, 5 an internal invariant was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .applications import ApplicationError, count_squarefree_exact, diophantine_report, squarefree_estimate, zeta2
from .bounds import (
    BoundError,
    BoundReport,
    first_derivative_bound,
    huxley_sargos_bound,
    kth_derivative_bound,
    second_derivative_bound,
    trivial_bound,
)
from .catalog import load_catalog, resolve_curve
from .curves import DEFAULT_PRECISION, CertificateError, CurveError, as_fraction, certify_bounds
from .enumeration import EnumerationError, GuardBandError, enumerate_close_points
from .interpolation import InterpolationError
from .majorarcs import ArcError, ArcFinding, analyze_arcs
from .verify import ALL_SUITES, run_suites

EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_GUARD, EXIT_INVARIANT = 0, 2, 3, 4, 5
THEOREMS = ("trivial", "first", "second", "kth", "hs", "all")


class HypothesisFailure(Exception):
    pass


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in header]] + [["" if v is None else str(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def _render(fmt: str, payload, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    if fmt == "json":
        return _dump_json(payload)
    if fmt == "csv":
        return _csv(header, rows)
    return _table(header, rows)


# --------------------------------------------------------------------------
# subcommands


def _curve(args):
    catalog = load_catalog(args.catalog) if args.catalog else None
    return resolve_curve(args.curve, args.N, catalog)


def cmd_enumerate(args) -> tuple:
    curve = _curve(args)
    close = enumerate_close_points(curve, args.delta, args.precision, force=args.force, workers=args.workers)
    if args.format == "json":
        return close.to_jsonl(), EXIT_OK
    rows = [(p.n, p.m, repr(float(p.offset)), repr(float(p.distance))) for p in close.points]
    return _render(args.format, None, ("n", "m", "offset", "distance"), rows), EXIT_OK


def _bound_reports(args, curve, count: int) -> List[BoundReport]:
    N, delta = curve.N, as_fraction(args.delta)
    wanted = THEOREMS[:-1] if args.theorem == "all" else (args.theorem,)
    reports: List[BoundReport] = []
    for thm in wanted:
        if thm == "trivial":
            reports.append(BoundReport("trivial", [], float(trivial_bound(N)), params={"N": N}))
        elif thm == "first":
            reports.append(first_derivative_bound(N, delta, certify_bounds(curve, 1)))
        elif thm == "second":
            reports.append(second_derivative_bound(N, delta, certify_bounds(curve, 2)))
        elif thm == "kth":
            reports.append(kth_derivative_bound(N, delta, certify_bounds(curve, args.k)))
        elif thm == "hs":
            cert = certify_bounds(curve, args.k)
            disjoint = False
            if args.branch == 1:
                close = enumerate_close_points(curve, delta, args.precision, force=args.force)
                disjoint = analyze_arcs(curve, close, args.k, cert, args.resolution).decomposition.certificate
                if not disjoint:
                    raise HypothesisFailure("branch 1 needs a disjointness certificate, and this instance has none")
            reports.append(huxley_sargos_bound(N, delta, cert, branch=args.branch, disjoint=disjoint))
    return [r.with_count(count) for r in reports]


def cmd_bound(args) -> tuple:
    curve = _curve(args)
    count = len(enumerate_close_points(curve, args.delta, args.precision, force=args.force))
    reports = _bound_reports(args, curve, count)
    payload = {"curve": curve.record(), "N": curve.N, "delta": str(as_fraction(args.delta)), "count": count,
               "reports": [r.to_json() for r in reports]}
    rows = [(r.theorem, "pass" if r.applicable else "FAIL: " + "; ".join(h.name for h in r.hypotheses if not h.passed),
             r.bound, r.count, r.margin, "advisory" if r.advisory else "") for r in reports]
    text = _render(args.format, payload, ("theorem", "hypotheses", "bound", "count", "margin", "note"), rows)
    status = EXIT_OK if all(r.applicable for r in reports) else EXIT_HYPOTHESIS
    if any(r.margin is not None and r.margin < 0 and not r.advisory for r in reports):
        status = EXIT_INVARIANT
    return text, status


def cmd_arcs(args) -> tuple:
    curve = _curve(args)
    close = enumerate_close_points(curve, args.delta, args.precision, force=args.force)
    try:
        cert = certify_bounds(curve, args.k)
    except CertificateError:
        cert = None
    an = analyze_arcs(curve, close, args.k, cert, args.resolution)
    payload = {"curve": curve.record(), "N": curve.N, "delta": str(close.delta), "count": len(close),
               "certificate": cert.to_json() if cert else None, **an.to_json()}
    rows = [(a["members"][0], a["members"][-1], len(a["members"]), a["q"], a["L"], a["components"],
             "pass" if all(v["passed"] for v in a["lemma7"].values()) else "FAIL") for a in payload["arcs"]]
    text = _render(args.format, payload, ("first", "last", "J", "q", "L", "components", "lemma7"), rows)
    failed = an.findings or any(not r.passed for r in an.lemma7)
    return text, EXIT_INVARIANT if failed else EXIT_OK


def cmd_verify(args) -> tuple:
    names = ALL_SUITES if args.suite == "all" else (args.suite,)
    results = run_suites(names, seed=args.seed, workers=args.workers)
    payload = {"seed": args.seed, "suites": list(names), "results": [r.to_json() for r in results],
               "passed": all(r.passed for r in results)}
    rows = [(r.criterion, r.name, "PASS" if r.passed else "FAIL") for r in results]
    text = _render(args.format, payload, ("criterion", "name", "result"), rows)
    return text, EXIT_OK if payload["passed"] else EXIT_INVARIANT


def _cube_root(x: Fraction):
    """x^(1/3), exact when x is a perfect cube."""
    r = round(float(x) ** (1 / 3))
    return Fraction(r) if Fraction(r) ** 3 == x else float(x) ** (1 / 3)


def cmd_squarefree(args) -> tuple:
    z2 = float(zeta2())
    if args.counts_only or len(args.x) > 1:
        rows, out = [], []
        for x in args.x:
            y = args.y if args.y is not None else math.ceil(args.c0 * float(x) ** (2 / 9) * math.log(float(x)))
            count = count_squarefree_exact(x, y)
            main = float(as_fraction(y)) / z2
            out.append({"x": str(as_fraction(x)), "y": str(as_fraction(y)), "count": count,
                        "main_term": main, "error": count - main})
            rows.append((out[-1]["x"], out[-1]["y"], count, main, count - main))
        return _render(args.format, {"rows": out}, ("x", "y", "count", "main_term", "error"), rows), EXIT_OK
    x = as_fraction(args.x[0])
    if args.y is None:
        raise ApplicationError("--y is required for a single-x report")
    A = args.A if args.A is not None else 2 * float(x) ** (2 / 9)
    B = args.B if args.B is not None else _cube_root(x)
    rep = squarefree_estimate(x, args.y, A, B, args.precision)
    payload = rep.to_json()
    rows = [(k, payload[k]) for k in ("x", "y", "A", "B", "count", "main_term", "error", "R1", "R1_N", "R2", "R2_N")]
    return _render(args.format, payload, ("field", "value"), rows), EXIT_OK


def cmd_dioph(args) -> tuple:
    rep = diophantine_report(args.k, args.alpha2, args.alpha3, args.theta, args.P)
    payload = rep.to_json()
    rows = [(q, b, c) for q, (b, c) in sorted(rep.per_q.items())]
    if args.format != "json":
        rows = [("total", rep.brute, rep.near_curve)] + rows
    return _render(args.format, payload, ("q", "brute", "near_curve"), rows), EXIT_OK


# --------------------------------------------------------------------------
# parser


def _fraction_arg(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, CurveError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="working precision in bits (env CURVEPOINTS_PRECISION)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", type=Path, help="write to this file instead of stdout")
    common.add_argument("--config", type=Path, help="JSON file of option defaults")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--force", action="store_true", help="classify guard-band points instead of aborting")
    common.add_argument("--workers", type=int, default=1)

    curve_opts = argparse.ArgumentParser(add_help=False)
    curve_opts.add_argument("--curve", required=True, help="catalog name or inline record")
    curve_opts.add_argument("--N", type=int, help="dyadic interval [N, 2N]; overrides the record")
    curve_opts.add_argument("--delta", type=_fraction_arg, required=True)
    curve_opts.add_argument("--catalog", type=Path, help="catalog file (default: bundled)")

    parser = argparse.ArgumentParser(prog="curvepoints", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common, curve_opts], help="list S(f, N, delta)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("bound", parents=[common, curve_opts], help="theorem bounds against the exact count")
    p.add_argument("--theorem", choices=THEOREMS, default="all")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--branch", type=int, choices=(1, 2), default=2)
    p.add_argument("--resolution", type=int, default=16)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("arcs", parents=[common, curve_opts], help="major arcs, proper arcs and checks")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--resolution", type=int, default=16)
    p.set_defaults(func=cmd_arcs)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=("all",) + ALL_SUITES, default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("squarefree", parents=[common], help="squarefree integers in (x, x+y]")
    p.add_argument("--x", type=_fraction_arg, nargs="+", required=True)
    p.add_argument("--y", type=_fraction_arg)
    p.add_argument("--A", type=_fraction_arg)
    p.add_argument("--B", type=_fraction_arg)
    p.add_argument("--c0", type=float, default=5.0, help="y = ceil(c0 x^(2/9) log x) when --y is absent")
    p.add_argument("--counts-only", action="store_true", help="skip the near-curve maxima")
    p.set_defaults(func=cmd_squarefree)

    p = sub.add_parser("dioph", parents=[common], help="|x1^k - a2 x2^k - a3 x3^k| < theta")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--alpha2", type=_fraction_arg, default=Fraction(1))
    p.add_argument("--alpha3", type=_fraction_arg, default=Fraction(1))
    p.add_argument("--theta", type=_fraction_arg, default=Fraction(1, 2))
    p.add_argument("--P", type=int, default=10)
    p.set_defaults(func=cmd_dioph)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: List[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        defaults = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(defaults, dict):
        parser.error("config must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    known = {a.dest for a in sub._actions}  # noqa: SLF001
    unknown = set(defaults) - known
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = _apply_config(parser, list(sys.argv[1:] if argv is None else argv))
    try:
        if args.precision < 64:
            raise CurveError("precision must be at least 64 bits")
        text, status = args.func(args)
    except GuardBandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (HypothesisFailure, CertificateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ArcFinding, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (CurveError, EnumerationError, BoundError, ApplicationError, ArcError, InterpolationError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
