"""Japanese word segmentation adapter (line-in/line-out).

Wraps the nagisa RNN segmenter: one sentence per stdin line, the
space-separated word partition per stdout line.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .common import AdapterManifest, fail

MANIFEST = AdapterManifest(
    stage="segment",
    model="nagisa/0.2",
    version=__version__,
    input_format="line-text",
    output_format="line-text",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sv2svt-adapter-segment", description=__doc__)
    parser.add_argument("--manifest", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.manifest:
        MANIFEST.emit()
        return 0
    try:
        import nagisa
    except ImportError as exc:
        fail(f"nagisa is required for the segment adapter: {exc}")
    for line in sys.stdin:
        words = nagisa.tagging(line.rstrip("\n")).words
        sys.stdout.write(" ".join(w for w in words if w.strip()) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
