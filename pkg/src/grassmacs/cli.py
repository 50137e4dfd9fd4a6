"""Batch front end: construct, check, count, sequence, oracle and grassmann verbs.

Data goes to stdout (or ``--out``); logs and usage errors go to stderr.
Exit status: 0 success, 1 property violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import constructions, counts, oracle
from .errors import MacsError
from .grassmann import verify_metabelian_identity
from .predicates import is_bicommutative, verify_macs
from .setcore import SetFamily, dumps_family, read_family, write_family

log = logging.getLogger("grassmacs")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _named(args: argparse.Namespace) -> SetFamily:
    try:
        return constructions.build_named(args.family, k=args.k, i=args.i, offset=args.offset, n=args.n)
    except ValueError as exc:
        if isinstance(exc, MacsError):
            raise
        raise UsageError(str(exc)) from None


def cmd_construct(args: argparse.Namespace) -> int:
    F = _named(args)
    log.info("constructed %s: n=%d size=%d", args.family, F.n, len(F))
    if args.layers:
        if not args.out:
            raise UsageError("--layers needs --out as a file prefix")
        for j, layer in F.layers().items():
            path = f"{args.out}.layer{j}"
            write_family(layer, path)
            log.info("wrote %s (%d sets)", path, len(layer))
        return EXIT_OK
    if args.format == "json":
        payload = {"family": args.family, "n": F.n, "size": len(F),
                   "layers": {str(j): v for j, v in F.layer_sizes().items()}, "members": F.as_sets()}
        _emit(_dump_json(payload), args.out)
    else:
        _emit(dumps_family(F), args.out)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    if args.family_file:
        F = read_family(args.family_file)
        name = str(args.family_file)
    elif args.family:
        F = _named(args)
        name = args.family
    else:
        raise UsageError("check needs --family or --family-file")

    start = time.perf_counter()
    if args.family in ("am", "fano"):
        s = int(F.cardinalities()[0])
        res = is_bicommutative(F, s, threads=args.threads)
        payload = {"family": name, "n": F.n, "size": len(F), "s": s, "bicommutative": res.ok,
                   "witness": res.violation.to_dict() if res.violation else None}
        ok = res.ok
    else:
        report = verify_macs(F, threads=args.threads)
        payload = {"family": name, **report.to_dict()}
        ok = report.passed
    log.info("check %s finished in %.3fs", name, time.perf_counter() - start)
    _emit(_dump_json(payload), args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


_COUNTERS = {
    "am": lambda k: (4 * k + 7, counts.count_am(k), {2 * k + 3: counts.count_am(k)}),
    "cone47": lambda k: (4 * k + 7, *counts.count_cone47(k)),
    "delta47": lambda k: (4 * k + 7, *counts.count_delta47(k)),
    "c49": lambda k: (4 * k + 9, *counts.count_c49(k)),
    "ex2": lambda k: (4 * k, counts.count_example2(k), {}),
    "ex3": lambda k: (4 * k + 2, counts.count_example3(k), {}),
}


def cmd_count(args: argparse.Namespace) -> int:
    if args.sequence:
        if args.k_max is None:
            raise UsageError("--sequence needs --k-max")
        table = counts.sequences(args.k_max)
        if args.format == "csv":
            _emit(table.to_csv(), args.out)
        else:
            _emit(_dump_json({"rows": table.to_records(), "flags": table.flags,
                              "trend_breaks": table.trend_breaks}), args.out)
        return EXIT_OK
    if args.family == "cone-singleton":
        if args.n is None:
            raise UsageError("cone-singleton needs --n")
        n, total, layers = args.n, counts.count_cone_singleton(args.n), {}
    elif args.family in _COUNTERS:
        if args.k is None:
            raise UsageError(f"family {args.family!r} needs --k")
        n, total, layers = _COUNTERS[args.family](args.k)
    else:
        raise UsageError("count needs --sequence or a countable --family")
    ratio = counts.ratio_to_quarter_power(total, n)
    payload = {
        "family": args.family, "k": args.k, "n": n, "count": total,
        "layers": {str(j): v for j, v in sorted(layers.items()) if v},
        "ratio_exact": f"{ratio.numerator}/{ratio.denominator}",
        "ratio_5sf": counts.format_sf(ratio),
    }
    if args.family == "am":
        bound = counts.ekr_bound(args.k)
        payload["ekr_bound"] = bound
        payload["ekr_ratio_5sf"] = counts.format_sf(counts.am_ratio(args.k))
    _emit(_dump_json(payload), args.out)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    if args.macs_n is not None:
        families = oracle.enumerate_all_macs(args.macs_n)
        if args.dump_families:
            target = Path(args.dump_families)
            target.mkdir(parents=True, exist_ok=True)
            for idx, F in enumerate(families):
                write_family(F, target / f"macs_n{args.macs_n}_{idx:03d}.fam")
        _emit(_dump_json({"n": args.macs_n, **oracle.macs_summary(families)}), args.out)
        return EXIT_OK
    if args.crosscheck:
        if not args.k:
            raise UsageError("--crosscheck needs at least one --k")
        reports = oracle.crosscheck_counts(args.k)
        for r in reports:
            log.info("%s: agree=%s (%.3fs)", r.instance, r.agree, r.elapsed)
        payload = [{key: v for key, v in r.to_dict().items() if key != "elapsed"} for r in reports]
        _emit(_dump_json(payload), args.out)
        return EXIT_OK if all(r.agree for r in reports) else EXIT_VIOLATION
    raise UsageError("oracle needs --macs-n or --crosscheck")


def cmd_grassmann(args: argparse.Namespace) -> int:
    holds = verify_metabelian_identity(args.identity_n, args.trials, args.seed)
    _emit(_dump_json({"n": args.identity_n, "trials": args.trials, "seed": args.seed,
                      "identity_holds": holds}), args.out)
    return EXIT_OK if holds else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grassmacs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    def family_args(p: argparse.ArgumentParser, *, choices=constructions.NAMED_FAMILIES) -> None:
        p.add_argument("--family", choices=choices)
        p.add_argument("--k", type=int)
        p.add_argument("--n", type=int, help="ground size for cone-singleton")
        p.add_argument("--i", type=int, help="distinguished element for cone-singleton / ex3")
        p.add_argument("--offset", type=int, help="window offset for fano")
        p.add_argument("--out")

    p = sub.add_parser("construct", help="materialize a named family")
    family_args(p)
    p.add_argument("--format", choices=("family-file", "json"), default="family-file")
    p.add_argument("--layers", action="store_true", help="write one file per layer to OUT.layer<j>")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("check", help="verify the MACS properties (or bicommutativity for am/fano)")
    family_args(p)
    p.add_argument("--family-file")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker count for pair scans (results do not depend on it)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("count", help="closed-form sizes and ratios")
    family_args(p, choices=("cone-singleton", "ex2", "ex3", "am", "cone47", "delta47", "c49"))
    p.add_argument("--sequence", action="store_true")
    p.add_argument("--k-max", type=int)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("oracle", help="exhaustive MACS search or count cross-checks")
    p.add_argument("--macs-n", type=int)
    p.add_argument("--dump-families")
    p.add_argument("--crosscheck", action="store_true")
    p.add_argument("--k", type=int, action="append")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("grassmann", help="exact check of [[x,y],z] = 0 on random elements")
    p.add_argument("--identity-n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_grassmann)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"grassmacs {args.verb}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
