"""CLI for the stub adapters: ``python -m sv2svt.stubs <stage> ...``."""

import argparse
import sys
from pathlib import Path

from . import CANNED_STAGES, run_canned, run_readings, run_segment
from ..moras import UnknownReadingError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sv2svt-stubs")
    sub = parser.add_subparsers(dest="stage", required=True)
    for stage in CANNED_STAGES:
        p = sub.add_parser(stage)
        p.add_argument("input")
        p.add_argument("output")
        if stage == "translate":
            p.add_argument("target_syllables", type=int)
    p = sub.add_parser("readings")
    p.add_argument("input")
    p.add_argument("output")
    sub.add_parser("segment")
    args = parser.parse_args(argv)

    try:
        if args.stage == "segment":
            run_segment()
        elif args.stage == "readings":
            run_readings(Path(args.input), Path(args.output))
        else:
            run_canned(args.stage, Path(args.input), Path(args.output))
    except (FileNotFoundError, UnknownReadingError) as exc:
        print(f"stub error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
