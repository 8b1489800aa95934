"""Command-line surface: verify, sweep, rr-compare, export.

Exit codes: 0 success, 1 usage or load error, 2 verification failure.
Rational CSV cells are printed as exact `p/q` strings; probability
averages as decimals.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .adapters import average_rate
from .bounds import (
    converse_2rr1s,
    converse_traditional_n2,
    load_external_curve,
    paper_corner_points,
)
from .curves import TradeoffCurve, envelope, parse_fraction
from .errors import D2DCacheError, FeasibilityError
from .io import dump_scheme, resolve_scheme
from .verify import verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="d2dcache", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scheme_args(p):
        p.add_argument("source", help="builtin:<name> or a scheme JSON file path")
        p.add_argument("--N", type=int, default=None, help="number of files")
        p.add_argument("--K", type=int, default=None, help="number of users")
        p.add_argument("--s", type=int, default=None, help="number of designated senders")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p_verify = sub.add_parser("verify", help="verify a scheme and print its report")
    add_scheme_args(p_verify)

    p_export = sub.add_parser("export", help="emit a scheme's interchange JSON")
    add_scheme_args(p_export)

    p_sweep = sub.add_parser("sweep", help="rate-memory sweep as CSV")
    p_sweep.add_argument("--model", choices=["2rr1s", "trad"], required=True)
    p_sweep.add_argument("--N", type=int, required=True)
    p_sweep.add_argument("--M-min", dest="m_min", default=None, help="rational, e.g. 7/6")
    p_sweep.add_argument("--M-max", dest="m_max", default=None)
    p_sweep.add_argument("--samples", type=int, default=9)
    p_sweep.add_argument("--baseline", action="append", default=[],
                         metavar="NAME=PATH", help="extra curve column from a file")
    p_sweep.add_argument("--out", default=None)

    p_rr = sub.add_parser("rr-compare", help="average worst-case rate comparison as CSV")
    p_rr.add_argument("--p", type=float, required=True, help="request probability in [0,1]")
    p_rr.add_argument("--N", type=int, required=True)
    p_rr.add_argument("--M-min", dest="m_min", default=None)
    p_rr.add_argument("--M-max", dest="m_max", default=None)
    p_rr.add_argument("--samples", type=int, default=9)
    p_rr.add_argument("--baseline", action="append", default=[],
                      metavar="r1|r2|r3=PATH", help="per-r baseline curve files")
    p_rr.add_argument("--out", default=None)

    return parser


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".", prefix=".d2dcache-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _parse_baselines(items: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--baseline expects NAME=PATH, got {item!r}")
        name, path = item.split("=", 1)
        out[name.strip()] = path.strip()
    return out


def _sample_grid(lo: Fraction, hi: Fraction, samples: int,
                 corner_Ms: Sequence[Fraction]) -> list[Fraction]:
    if samples < 2:
        raise UsageError("--samples must be at least 2")
    if hi < lo:
        raise UsageError("--M-max must not be below --M-min")
    grid = {lo, hi}
    for i in range(samples):
        grid.add(lo + (hi - lo) * Fraction(i, samples - 1))
    for m in corner_Ms:
        if lo <= m <= hi:
            grid.add(m)
    return sorted(grid)


def cmd_verify(args) -> int:
    scheme = resolve_scheme(args.source, args.N, args.K, args.s)
    report = verify(scheme)
    _write_output(json.dumps(report.to_json_dict(), indent=2), args.out)
    if report.passed:
        return EXIT_OK
    failing = [",".join(str(v) for v in e.demand) for e in report.demands if not e.decodable]
    print(
        "verification failed: "
        + (f"undecodable demands: {'; '.join(failing)}" if failing
           else "feasibility flags not satisfied"),
        file=sys.stderr,
    )
    return EXIT_VERIFY_FAILED


def cmd_export(args) -> int:
    scheme = resolve_scheme(args.source, args.N, args.K, args.s)
    _write_output(dump_scheme(scheme), args.out)
    return EXIT_OK


def _sweep_domain(model: str, N: int) -> tuple[Fraction, Fraction]:
    if model == "2rr1s":
        return Fraction(N, 2), Fraction(N)
    return Fraction(2, 3), Fraction(2)


def cmd_sweep(args) -> int:
    model, N = args.model, args.N
    if model == "trad" and N != 2:
        raise UsageError("the traditional-model sweep is characterized only for --N 2")
    lo_default, hi_default = _sweep_domain(model, N)
    lo = parse_fraction(args.m_min) if args.m_min else lo_default
    hi = parse_fraction(args.m_max) if args.m_max else hi_default
    if lo < lo_default or hi > hi_default:
        raise UsageError(
            f"M range [{lo}, {hi}] outside the feasible range [{lo_default}, {hi_default}]"
        )
    if model == "2rr1s":
        curve = envelope(paper_corner_points("2rr1s", N))
        converse = lambda M: converse_2rr1s(N, M)
    else:
        curve = envelope(paper_corner_points("trad_n2"))
        converse = converse_traditional_n2

    baselines = _parse_baselines(args.baseline)
    loaded = {name: load_external_curve(path, N) for name, path in baselines.items()}

    corner_Ms = list(curve.corner_Ms())
    for c in loaded.values():
        corner_Ms.extend(c.corner_Ms())
    grid = _sample_grid(lo, hi, args.samples, corner_Ms)

    header = ["M", "R_achievable", "R_converse"] + [f"baseline_{n}" for n in sorted(loaded)]
    lines = [",".join(header)]
    for M in grid:
        row = [str(M), str(curve.value_at(M)), str(converse(M))]
        for name in sorted(loaded):
            c = loaded[name]
            row.append(str(c.value_at(M)) if M >= c.min_M else "")
        lines.append(",".join(row))
    _write_output("\n".join(lines), args.out)
    return EXIT_OK


def cmd_rr_compare(args) -> int:
    if not 0 <= args.p <= 1:
        raise UsageError("--p must lie in [0, 1]")
    N = args.N
    baselines = _parse_baselines(args.baseline)
    missing = [r for r in ("r1", "r2", "r3") if r not in baselines]
    if missing:
        raise UsageError(f"missing baseline file(s) for {', '.join(missing)}")
    base_curves = {r: load_external_curve(baselines[r], N) for r in ("r1", "r2", "r3")}
    ours = {
        1: envelope(paper_corner_points("rr_ours_r1", N)),
        2: envelope(paper_corner_points("rr_ours_r2", N)),
        3: envelope(paper_corner_points("rr_ours_r3", N)),
    }

    lo_default = max(c.min_M for c in ours.values())
    lo = parse_fraction(args.m_min) if args.m_min else lo_default
    hi = parse_fraction(args.m_max) if args.m_max else Fraction(N)
    corner_Ms = [m for c in ours.values() for m in c.corner_Ms()]
    corner_Ms += [m for c in base_curves.values() for m in c.corner_Ms()]
    grid = _sample_grid(lo, hi, args.samples, corner_Ms)

    def curve_rate(curve: TradeoffCurve, M: Fraction) -> Fraction:
        return curve.value_at(M)

    lines = ["M,avg_ours,avg_baseline"]
    for M in grid:
        rates_ours = {0: Fraction(0)}
        rates_base = {0: Fraction(0)}
        try:
            for r in (1, 2, 3):
                rates_ours[r] = curve_rate(ours[r], M)
                rates_base[r] = curve_rate(base_curves[f"r{r}"], M)
        except FeasibilityError:
            continue
        avg_ours = average_rate(args.p, rates_ours)
        avg_base = average_rate(args.p, rates_base)
        lines.append(f"{M},{avg_ours:.15g},{avg_base:.15g}")
    _write_output("\n".join(lines), args.out)
    return EXIT_OK


_COMMANDS = {
    "verify": cmd_verify,
    "export": cmd_export,
    "sweep": cmd_sweep,
    "rr-compare": cmd_rr_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except D2DCacheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
