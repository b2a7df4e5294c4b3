"""Command-line interface: ``superwp corr|volume|table|verify|series``.

Exit codes: 0 success, 1 failed verification, 2 bad arguments,
3 undefined correlator, 4 disagreeing values (between strategies or
against the cache), 5 cache or file I/O problems.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .cache import CacheError, cache_load, cache_store, default_cache_path
from .correlator import (STATS, CorrelatorKey, Strategy, StrategyDisagreement,
                         StrategyNotApplicable, UndefinedCorrelator, correlator, degree_valid_keys,
                         table_snapshot)
from .render import format_kappa, format_psi, format_rational, parse_kappa, parse_psi
from .tau import SeriesCutoff, build_free_energy, exponentiate
from .verify import SUITES, VerifyBounds, evaluate_keys, run_suite
from .volumes import normalized_volume, super_volume, volume_polynomial

EXIT_FAILED, EXIT_USAGE, EXIT_UNDEFINED, EXIT_DISAGREE, EXIT_IO = 1, 2, 3, 4, 5


class UsageError(ValueError):
    pass


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options")
    g.add_argument("--cache", metavar="PATH",
                   help="correlator cache file (overrides SWP_CACHE and the default)")
    g.add_argument("--no-cache", action="store_true", help="do not read or write a cache")
    g.add_argument("--jobs", type=_positive, default=None,
                   help="worker processes for table and verify (default: all cores)")
    g.add_argument("--stats", action="store_true",
                   help="print table hit and evaluation counters to stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="superwp", description="Exact Theta-class intersection numbers and super volumes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corr", parents=[common], help="one correlator")
    p.add_argument("genus", type=_nonneg)
    p.add_argument("--kappa", default="", help='kappa monomial, e.g. "1:2,3:1"')
    p.add_argument("--psi", default="", help='psi exponents, e.g. "0,0,1"')
    p.add_argument("--strategy", default=Strategy.AUTO,
                   choices=[Strategy.AUTO, Strategy.KMZ, Strategy.ALTERNATING, Strategy.ALPHA,
                            Strategy.CLOSED])
    p.add_argument("--format", default="human", choices=["human", "json"])

    p = sub.add_parser("volume", parents=[common], help="a volume polynomial")
    p.add_argument("genus", type=_nonneg)
    p.add_argument("points", type=_nonneg)
    p.add_argument("--variant", default="plain", choices=["plain", "normalized", "super"])

    p = sub.add_parser("table", parents=[common], help="all correlators in a range")
    p.add_argument("--g-max", type=_positive, required=True)
    p.add_argument("--weight-max", type=_positive, default=4,
                   help="bound on psi insertions plus kappa factors (default 4)")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--out", default="-", help="output file, '-' for stdout")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", default="all", choices=SUITES)
    p.add_argument("--max-genus", type=_positive, default=None,
                   help="cap every genus bound of the suite")
    p.add_argument("--report", metavar="PATH", help="also write the JSON report here")

    p = sub.add_parser("series", parents=[common], help="dump a truncated generating function")
    p.add_argument("--max-genus", type=_positive, required=True)
    p.add_argument("--max-points", type=_nonneg, required=True)
    p.add_argument("--max-s-weight", type=_nonneg, default=0)
    p.add_argument("--max-t-index", type=_nonneg, default=None)
    p.add_argument("--max-weight", type=_nonneg, default=None)
    p.add_argument("--no-kappa", action="store_true", help="drop the s variables")
    p.add_argument("--exp", action="store_true", help="dump exp of the free energy")
    return parser


# ----------------------------------------------------------------------------
# commands


def _key(args) -> CorrelatorKey:
    try:
        return CorrelatorKey(args.genus, parse_kappa(args.kappa), parse_psi(args.psi))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_corr(args, out) -> int:
    key = _key(args)
    value = correlator(key, args.strategy)
    if args.format == "json":
        payload = {"genus": key.genus, "kappa": [list(p) for p in key.kappa.items()],
                   "psi": list(key.psi), "strategy": args.strategy,
                   "value": format_rational(value, explicit_denominator=True)}
        out.write(json.dumps(payload) + "\n")
    else:
        out.write(format_rational(value) + "\n")
    return 0


def cmd_volume(args, out) -> int:
    fn = {"plain": volume_polynomial, "normalized": normalized_volume,
          "super": super_volume}[args.variant]
    out.write(fn(args.genus, args.points).render() + "\n")
    return 0


def table_keys(g_max: int, weight_max: int) -> list[CorrelatorKey]:
    """Degree-valid keys with ``g <= g_max`` and ``n + size(kappa) <= weight_max``."""
    keys = degree_valid_keys(g_max, weight_max, weight_max)
    return [k for k in keys if k.n + k.kappa.size <= weight_max]


def render_table(values: dict, fmt: str) -> str:
    keys = sorted(values, key=CorrelatorKey.sort_key)
    if fmt == "json":
        rows = [{"g": k.genus, "kappa": format_kappa(k.kappa), "psi": format_psi(k.psi),
                 "value": format_rational(values[k], explicit_denominator=True)} for k in keys]
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["g", "kappa", "psi", "value"])
    for k in keys:
        writer.writerow([k.genus, format_kappa(k.kappa), format_psi(k.psi),
                         format_rational(values[k])])
    return buf.getvalue()


def cmd_table(args, out) -> int:
    keys = table_keys(args.g_max, args.weight_max)
    values = evaluate_keys(keys, Strategy.AUTO, args.jobs)
    text = render_table(values, args.format)
    if args.out == "-":
        out.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def cmd_verify(args, out) -> int:
    bounds = VerifyBounds()
    if args.max_genus is not None:
        bounds = bounds.capped(args.max_genus)
    report = run_suite(args.suite, bounds, jobs=args.jobs)
    text = json.dumps(report, indent=2) + "\n"
    out.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if report["passed"] else EXIT_FAILED


def cmd_series(args, out) -> int:
    try:
        cutoff = SeriesCutoff(args.max_genus, args.max_points,
                              0 if args.no_kappa else args.max_s_weight,
                              args.max_t_index, args.max_weight)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    series = build_free_energy(cutoff, with_kappa=not args.no_kappa)
    if args.exp:
        series = exponentiate(series)
    out.write(series.dump())
    return 0


COMMANDS = {"corr": cmd_corr, "volume": cmd_volume, "table": cmd_table, "verify": cmd_verify,
            "series": cmd_series}


# ----------------------------------------------------------------------------
# entry point


def _cache_path(args) -> Optional[str]:
    if args.no_cache:
        return None
    return args.cache or os.environ.get("SWP_CACHE") or str(default_cache_path())


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.jobs is None:
        args.jobs = os.cpu_count() or 1
    path = _cache_path(args)
    try:
        loaded = cache_load(path) if path else 0
        before = len(table_snapshot())
        code = COMMANDS[args.command](args, out)
        if path and len(table_snapshot()) != before:
            cache_store(path)
    except (UsageError, StrategyNotApplicable) as exc:
        err.write(f"superwp: error: {exc}\n")
        return EXIT_USAGE
    except UndefinedCorrelator as exc:
        err.write(f"superwp: undefined: {exc}\n")
        return EXIT_UNDEFINED
    except StrategyDisagreement as exc:
        err.write(f"superwp: disagreement: {exc}\n")
        return EXIT_DISAGREE
    except (CacheError, OSError) as exc:
        err.write(f"superwp: I/O error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        err.write(f"superwp: error: {exc}\n")
        return EXIT_USAGE
    if args.stats:
        err.write(f"cache_loaded={loaded} hits={STATS['hits']} "
                  f"evaluations={STATS['evaluations']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
