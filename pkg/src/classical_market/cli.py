"""Command-line entry point: ``classical-market <command> [flags]``.

Exit codes: 0 success, 2 usage error, 3 configuration or input error,
4 runtime error inside a model.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import MarketError, ParseError, ValidationError
from .harness import COMMANDS, build_config, parse_config, run

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

_HELP = {
    "curves": "demand, supply, excess supply and potential rent at every limit",
    "cov": "center of value, minimal rent and cleared quantity",
    "garnier": "generate a Garnier buyer population and check the law of demand",
    "auction": "run a continuous double auction session",
    "asset": "run a fundamental or speculative asset market",
}


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML scenario file")
    common.add_argument("--seed", type=_u64, help="scenario seed (overrides the config)")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for repetitions")
    common.add_argument("--population", help="side,limit,quantity CSV (overrides the config)")
    parser = argparse.ArgumentParser(prog="classical-market", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=_HELP[name])
    return parser


def _load(args):
    overrides = {"seed": args.seed, "out": args.out}
    if args.population is not None:
        overrides["population"] = {"csv": args.population}
    if args.config is None:
        return build_config({}, args.command, overrides)
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {args.config}: {exc}") from None
    return parse_config(text, args.command, overrides)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        config = _load(args)
        manifest = run(config, jobs=args.jobs)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MarketError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps(manifest.summary, indent=2))
    return EXIT_OK
