#!/usr/bin/env python3
"""Regenerate the end-to-end pipeline fixture and the stub canned outputs.

Writes tests/fixtures/performance.audio plus, for each canned stub stage,
the output file named by the SHA-256 (first 16 hex chars) of its input.
Deterministic: rerunning reproduces identical bytes.
"""

import hashlib
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from sv2svt.contour import midi_to_hz  # noqa: E402
from sv2svt.fitting import TranslationCandidate  # noqa: E402
from sv2svt.interchange import TranscriptLine, write_candidates, write_transcript  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
CANNED = ROOT / "src" / "sv2svt" / "stubs" / "canned"

AUDIO_BYTES = b"SV2SVT-FIXTURE-AUDIO-v1: not real audio; adapters never decode it\n"

LINES = [
    TranscriptLine("blueberry blueberry", 0.10, 2.70),
    TranscriptLine("extra cat", 3.00, 4.22),
]

# word 0/1: blueberry, word 2: extra, word 3: cat
LABEL_ROWS = [
    ("0.000000", "0.100000", "SIL", "-1"),
    ("0.100000", "0.180000", "B", "0"),
    ("0.180000", "0.250000", "L", "0"),
    ("0.250000", "0.600000", "UW1", "0"),
    ("0.600000", "0.660000", "B", "0"),
    ("0.660000", "0.900000", "EH2", "0"),
    ("0.900000", "0.980000", "R", "0"),
    ("0.980000", "1.300000", "IY0", "0"),
    ("1.300000", "1.500000", "SIL", "-1"),
    ("1.500000", "1.580000", "B", "1"),
    ("1.580000", "1.650000", "L", "1"),
    ("1.650000", "2.000000", "UW1", "1"),
    ("2.000000", "2.060000", "B", "1"),
    ("2.060000", "2.300000", "EH2", "1"),
    ("2.300000", "2.380000", "R", "1"),
    ("2.380000", "2.700000", "IY0", "1"),
    ("2.700000", "3.000000", "SIL", "-1"),
    ("3.000000", "3.200000", "EH1", "2"),
    ("3.200000", "3.260000", "K", "2"),
    ("3.260000", "3.340000", "S", "2"),
    ("3.340000", "3.400000", "T", "2"),
    ("3.400000", "3.460000", "R", "2"),
    ("3.460000", "3.700000", "AH0", "2"),
    ("3.800000", "3.880000", "K", "3"),
    ("3.880000", "4.100000", "AE1", "3"),
    ("4.100000", "4.220000", "T", "3"),
]

# (start, end, MIDI pitch or None for unvoiced), sampled at 10 ms hops
MELODY = [
    (0.00, 0.10, None),
    (0.10, 0.60, 60),
    (0.60, 0.90, 62),
    (0.90, 1.30, 64),
    (1.30, 1.50, None),
    (1.50, 2.00, 67),
    (2.00, 2.30, 64),
    (2.30, 2.70, 62),
    (2.70, 3.00, None),
    (3.00, 3.34, 60),
    (3.34, 3.70, 62),
    (3.70, 3.80, None),
    (3.80, 4.22, 60),
    (4.22, 4.30, None),
]

CANDIDATES = {
    # target 6: the kanji candidate fits exactly (hana-ga-sa-ku-yo)
    "blueberry blueberry": (
        6,
        [
            TranslationCandidate("花が咲くよ", -0.30),
            TranslationCandidate("はなのうた", -0.10),
            TranslationCandidate("花火の歌だよ", -0.05),
        ],
    ),
    # target 3: nothing fits exactly; ねこ (2 moras) wins with deficit 1,
    # exercising the "+" sustain on the third note
    "extra cat": (
        3,
        [
            TranslationCandidate("ねこ", -0.50),
            TranslationCandidate("猫だよ", -0.20),
            TranslationCandidate("こねこちゃん", -0.10),
        ],
    ),
}


def key_of(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def put(stage: str, input_bytes: bytes, output_text: str) -> None:
    path = CANNED / stage / key_of(input_bytes)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(output_text.encode("utf-8"))
    print(f"canned {stage}/{path.name}  ({len(output_text)} chars)")


def contour_csv() -> str:
    rows = ["time_s,f0_hz"]
    n_frames = round(MELODY[-1][1] / 0.01)
    for k in range(n_frames):
        t = k * 0.01
        pitch = None
        for start, end, midi in MELODY:
            if start - 1e-9 <= t < end - 1e-9:
                pitch = midi
                break
        f0 = 0.0 if pitch is None else midi_to_hz(pitch)
        rows.append(f"{t:.6f},{f0:.6f}")
    return "\n".join(rows) + "\n"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    audio = FIXTURES / "performance.audio"
    audio.write_bytes(AUDIO_BYTES)
    print(f"fixture audio -> {audio}")

    transcript = write_transcript(LINES)
    put("transcribe", AUDIO_BYTES, transcript)

    labels = "\n".join("\t".join(row) for row in LABEL_ROWS) + "\n"
    put("align", transcript.encode("utf-8"), labels)

    put("vme", AUDIO_BYTES, contour_csv())

    for text, (target, candidates) in CANDIDATES.items():
        line_file = (text + "\n").encode("utf-8")
        put("translate", line_file, write_candidates(target, candidates))


if __name__ == "__main__":
    main()
