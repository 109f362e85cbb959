"""Command line entry: python -m qurate <command> [options]."""

import argparse
import sys

from qurate._core import run_command

COMMANDS = ["demo", "annotate", "score", "select", "sweep", "transfer"]


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qurate",
        description="Reliability-guided curation of weakly annotated text "
        "via per-frame QUBO subset selection",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default="", help="run configuration (JSON)")
    parser.add_argument("--seed", type=int, default=-1, help="override the config seed")
    parser.add_argument("--out", default="", help="output directory")
    parser.add_argument("--workers", type=int, default=0, help="worker threads")
    parser.add_argument("--mock", action="store_true", help="use the deterministic mock backends")
    parser.add_argument("--method", choices=["qubo", "distmatch"], default="qubo")
    args = parser.parse_args(argv)
    try:
        return run_command(
            args.command,
            config=args.config,
            out=args.out,
            seed=args.seed,
            workers=args.workers,
            mock=args.mock,
            method=args.method,
        )
    except RuntimeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
