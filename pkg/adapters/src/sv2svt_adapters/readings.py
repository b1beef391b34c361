"""Kanji reading adapter.

Wraps the dictionary-based pykakasi converter: one surface form per input
line, ``surface<TAB>reading`` TSV out with hiragana readings.  Words whose
conversion leaves non-kana residue are skipped with a stderr note so the
caller can surface them as unknown readings.
"""

from __future__ import annotations

import argparse
import sys
import unicodedata
from pathlib import Path

from . import __version__
from .common import AdapterManifest, fail

MANIFEST = AdapterManifest(
    stage="readings",
    model="pykakasi/2.2",
    version=__version__,
    input_format="words-txt@1",
    output_format="readings-tsv@1",
)


def is_pure_kana(text: str) -> bool:
    for ch in text:
        code = ord(ch)
        if not (0x3041 <= code <= 0x3096 or 0x30A1 <= code <= 0x30FA or ch == "ー"):
            return False
    return bool(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sv2svt-adapter-readings", description=__doc__
    )
    parser.add_argument("input", nargs="?", help="words file, one surface per line")
    parser.add_argument("output", nargs="?", help="output readings TSV")
    parser.add_argument("--manifest", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        MANIFEST.emit()
        return 0
    if not args.input or not args.output:
        parser.error("input and output are required")
    try:
        import pykakasi
    except ImportError as exc:
        fail(f"pykakasi is required for the readings adapter: {exc}")
    kakasi = pykakasi.kakasi()
    rows = []
    for raw in Path(args.input).read_text(encoding="utf-8").splitlines():
        word = unicodedata.normalize("NFC", raw.strip())
        if not word:
            continue
        reading = "".join(item["hira"] for item in kakasi.convert(word))
        if not is_pure_kana(reading):
            print(f"skipping {word!r}: conversion left non-kana residue",
                  file=sys.stderr)
            continue
        rows.append(f"{word}\t{reading}")
    Path(args.output).write_text("\n".join(rows) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
