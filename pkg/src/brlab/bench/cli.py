"""Command-line entry point ``brlab``.

Exit codes: 0 success (no FAIL verdict), 1 a FAIL verdict or a baseline
regression, 2 config or input errors, 3 resource budget exceeded.
"""

import argparse
import os
import sys

from ..errors import ResourceError
from .config import ConfigParseError, dump_spec, load_spec
from .runner import default_output_dir, report, run_spec, write_record
from .scenarios import SCENARIOS

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


def _workers(args):
    if args.workers is not None:
        return args.workers
    env = os.environ.get("BRLAB_WORKERS")
    return int(env) if env else None


def cmd_run(args):
    try:
        spec = load_spec(args.config)
        record = run_spec(spec, workers=_workers(args))
    except ConfigParseError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    out_dir = args.output or default_output_dir()
    path = write_record(record, out_dir)
    for r in record["results"]:
        print(f"{r['verdict']:<4} {r['task']}")
    print(f"{record['verdict']} -> {path}")
    return EXIT_FAIL if record["verdict"] == "FAIL" else EXIT_OK


def cmd_report(args):
    try:
        text, regressions = report(args.run_dir, args.baseline)
    except (FileNotFoundError, ValueError) as exc:
        print(f"report error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(text)
    return EXIT_FAIL if regressions else EXIT_OK


def cmd_list(args):
    for name, sc in SCENARIOS.items():
        print(f"{name:<20} {sc.doc}")
    return EXIT_OK


def cmd_default(args):
    if args.scenario not in SCENARIOS:
        print(f"unknown scenario {args.scenario!r}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(dump_spec(SCENARIOS[args.scenario].default_config()))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="brlab", description="Spectral Bochner-Riesz experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output directory (default $BRLAB_OUTPUT_DIR)")
    p.add_argument("-w", "--workers", type=int, help="worker count (default $BRLAB_WORKERS)")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("report", help="summarise a run directory")
    p.add_argument("run_dir")
    p.add_argument("--baseline")
    p.set_defaults(func=cmd_report)
    p = sub.add_parser("list-scenarios", help="list the available scenarios")
    p.set_defaults(func=cmd_list)
    p = sub.add_parser("print-default-config", help="print a scenario's default config")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_default)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
