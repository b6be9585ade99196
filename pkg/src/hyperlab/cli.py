"""Command-line front end for scenario files.

    hyperlab check example34 --out reports --format json,table
    hyperlab validate my.scenario

Exit status: 0 ok, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from . import scenario as sc
from .errors import ConfigurationError, HyperlabError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

_SUBCOMMANDS = {
    "check": ("criterion",),
    "witness": ("witness",),
    "orbit": ("orbit",),
    "norms": ("norms",),
    "run": None,
}


def _formats(text):
    out = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in out if f not in sc.FORMATS]
    if bad or not out:
        raise argparse.ArgumentTypeError(f"format must be among {', '.join(sc.FORMATS)}")
    return tuple(out)


def build_parser():
    p = argparse.ArgumentParser(prog="hyperlab", description="Run operator-dynamics scenarios.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "check": "evaluate criterion runs",
        "witness": "build witness operators and log residuals",
        "orbit": "orbit norm profiles and orbit-approach tables",
        "norms": "raw compression-norm tables",
        "run": "every run in the scenario",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("config", help="scenario file, or a shipped fixture name")
        s.add_argument("--mode", choices=["exact", "float"], help="override the scenario's arithmetic")
        s.add_argument("--out", help="report directory (default: the scenario's 'output')")
        s.add_argument("--format", type=_formats, help="json, csv, table or a comma list")
        s.add_argument("--run", action="append", dest="runs", metavar="ID", help="only this run (repeatable)")
        s.add_argument("--quiet", action="store_true", help="no summary on stdout")
    v = sub.add_parser("validate", help="parse and check a scenario without running it")
    v.add_argument("config")
    f = sub.add_parser("fixtures", help="list or print the shipped scenarios")
    f.add_argument("name", nargs="?")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "fixtures":
        if args.name:
            try:
                sys.stdout.write(sc.fixture_text(args.name))
            except FileNotFoundError:
                print(f"error: no fixture named {args.name!r}", file=sys.stderr)
                return EXIT_CONFIG
        else:
            print("\n".join(sc.FIXTURES))
        return EXIT_OK
    try:
        cfg = sc.load_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigurationError, HyperlabError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(f"{cfg.name}: ok ({len(cfg.operators)} operators, {len(cfg.systems)} systems, "
              f"{len(cfg.runs)} runs, sha256 {cfg.sha256[:12]})")
        return EXIT_OK
    if args.runs:
        unknown = set(args.runs) - {r.id for r in cfg.runs}
        if unknown:
            print(f"config error: unknown run id(s) {sorted(unknown)}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        status, results = sc.run_scenario(cfg, out=args.out, formats=args.format, mode=args.mode,
                                          kinds=_SUBCOMMANDS[args.command],
                                          run_ids=set(args.runs) if args.runs else None)
    except OSError as exc:
        print(f"error: cannot write reports: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if not args.quiet:
        for r in results:
            if r.status == "ok":
                print(f"{r.run_id:<28} {r.kind:<10} {r.verdict:<13} {' '.join(r.paths)}")
            else:
                print(f"{r.run_id:<28} {r.kind:<10} ERROR         {r.error}")
        if args.format and "table" in args.format:
            for r in results:
                if r.report is not None:
                    print()
                    print(r.report.to_table(), end="")
    return status


if __name__ == "__main__":
    sys.exit(main())
