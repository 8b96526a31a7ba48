"""``conicmin`` command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .errors import (
    ConicMinError,
    EmptyFamilyError,
    ParseError,
    TooLargeError,
    UnsupportedDimensionError,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _emit(data) -> None:
    print(json.dumps(data, sort_keys=True, indent=2))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conicmin", description="Comparison-oracle minimization of conic functions on lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("minimize", help="solve a JSON problem spec")
    m.add_argument("spec")
    m.add_argument("--verify", action="store_true", help="cross-check against exhaustive search")
    m.add_argument("--require-feasible", action="store_true", help="exit 3 unless a feasible point is found")

    g = sub.add_parser("gcd", help="gcd(a, b) via lattice minimization")
    g.add_argument("a", type=int)
    g.add_argument("b", type=int)
    g.add_argument("--verify", action="store_true")

    b = sub.add_parser("bench", help="sweep a grid and write CSV")
    b.add_argument("config")
    b.add_argument("--out", default="-")

    a = sub.add_parser("adversary", help="oracle counts on lower-bound families")
    a.add_argument("--n", type=int, default=1)
    a.add_argument("--r", type=int, default=2)
    a.add_argument("--variant", choices=["general", "even"], default="general")
    a.add_argument("--trials", type=int, default=1)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--csv", action="store_true", help="print CSV rows instead of JSON")

    lat = sub.add_parser("lattice", help="lattice utilities")
    lat.add_argument("op", choices=["svp", "cvp", "lll"])
    lat.add_argument("basis")
    return p


def run(args) -> int:
    if args.command == "minimize":
        record = harness.cmd_minimize(_load_json(args.spec), verify=args.verify)
        _emit(record)
        if args.require_feasible and record["status"] != "OPTIMAL":
            return EXIT_INFEASIBLE
        if args.verify and not record["verify"]["ok"]:
            return EXIT_INTERNAL
        return EXIT_OK
    if args.command == "gcd":
        _, record = harness.cmd_gcd(args.a, args.b, verify=args.verify)
        _emit(record)
        return EXIT_INTERNAL if args.verify and not record["verify"]["ok"] else EXIT_OK
    if args.command == "bench":
        text = harness.cmd_bench(_load_json(args.config))
        if args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return EXIT_OK
    if args.command == "adversary":
        report = harness.cmd_adversary(args.n, args.r, args.variant, args.trials, args.seed)
        if args.csv:
            sys.stdout.write(harness.rows_to_csv(report["rows"]))
        else:
            _emit(report)
        return EXIT_OK
    if args.command == "lattice":
        _emit(harness.cmd_lattice(args.op, _load_json(args.basis)))
        return EXIT_OK
    return EXIT_PARSE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ParseError, EmptyFamilyError, UnsupportedDimensionError, TooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConicMinError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
