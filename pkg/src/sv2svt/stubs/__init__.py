"""Deterministic stub adapters for offline pipeline testing.

The transcribe, align, vme and translate stubs replay canned outputs keyed
by the SHA-256 of their input file, so a fixture input always produces the
same bytes and an unknown input fails loudly.  The segment stub applies the
kanji-run rule and the readings stub answers from the bundled mini reading
dictionary; both are deterministic by construction.
"""

from __future__ import annotations

import hashlib
import sys
from importlib.resources import files
from pathlib import Path

from ..moras import KanjiRunSegmenter
from ..resources import bundled_readings

CANNED_STAGES = ("transcribe", "align", "vme", "translate")


def input_key(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def canned_output(stage: str, key: str) -> bytes:
    resource = files("sv2svt").joinpath("stubs", "canned", stage, key)
    if not resource.is_file():
        raise FileNotFoundError(
            f"stub {stage}: no canned output for input hash {key}"
        )
    return resource.read_bytes()


def run_canned(stage: str, input_path: Path, output_path: Path) -> None:
    key = input_key(input_path)
    output_path.write_bytes(canned_output(stage, key))


def run_segment(stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    segmenter = KanjiRunSegmenter()
    for line in stdin:
        words = segmenter.segment(line.rstrip("\n"))
        stdout.write(" ".join(words) + "\n")


def run_readings(input_path: Path, output_path: Path) -> None:
    readings = bundled_readings()
    lines = []
    for word in input_path.read_text(encoding="utf-8").splitlines():
        word = word.strip()
        if not word:
            continue
        lines.append(word + "\t" + "\t".join(readings.readings(word)))
    output_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
