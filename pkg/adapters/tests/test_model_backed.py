"""Schema-only checks of the model-backed adapters.

Real models are content-nondeterministic, so nothing here asserts content:
outputs are validated against the interchange schemas.  Each test skips
when its model or library is not installed locally (the runner sets
HF_HUB_OFFLINE, so absent weights fail fast instead of downloading).
"""

import json

import pytest

from sv2svt.interchange import (
    validate_candidates,
    validate_labels,
    validate_transcript,
)

from conftest import run_adapter, write_sine_wav

SMALL_ASR = "openai/whisper-tiny"
SMALL_MT = "facebook/nllb-200-distilled-600M"
SMALL_CTC = "facebook/wav2vec2-base-960h"


def run_or_skip(name, *args, stdin=None):
    proc = run_adapter(name, *args, stdin=stdin)
    if proc.returncode == 3 and (
        "required for" in proc.stderr or "cannot load" in proc.stderr
    ):
        pytest.skip(f"{name} backend unavailable: {proc.stderr.strip().splitlines()[-1]}")
    return proc


def test_transcribe_schema(tmp_path, sine_wav):
    out = tmp_path / "transcript.json"
    proc = run_or_skip(
        "transcribe", str(sine_wav), str(out), "--model", SMALL_ASR
    )
    assert proc.returncode == 0, proc.stderr
    validate_transcript(out.read_text(encoding="utf-8"))


def test_translate_schema(tmp_path):
    line = tmp_path / "line.txt"
    line.write_text("the flowers bloom\n", encoding="utf-8")
    out = tmp_path / "candidates.json"
    proc = run_or_skip(
        "translate", str(line), str(out), "6", "--model", SMALL_MT, "--beams", "4"
    )
    assert proc.returncode == 0, proc.stderr
    target, candidates = validate_candidates(out.read_text(encoding="utf-8"))
    assert target == 6 and len(candidates) >= 1


def test_align_schema(tmp_path):
    wav = write_sine_wav(tmp_path / "speechish.wav", frequency=200.0, duration_s=1.5)
    transcript = tmp_path / "transcript.json"
    transcript.write_text(
        json.dumps(
            {
                "schema_version": "1",
                "lines": [
                    {"text": "cat", "start_s": "0.000000", "end_s": "1.500000"}
                ],
            }
        ),
        encoding="utf-8",
    )
    dictionary = tmp_path / "dict.txt"
    dictionary.write_text("CAT  K AE1 T\n", encoding="utf-8")
    out = tmp_path / "labels.tsv"
    proc = run_or_skip(
        "align", str(transcript), str(out),
        "--audio", str(wav), "--dict", str(dictionary), "--model", SMALL_CTC,
    )
    assert proc.returncode == 0, proc.stderr
    phonemes, _gaps = validate_labels(out.read_text(encoding="utf-8"))
    assert [p.phoneme.render() for p in phonemes] == ["K", "AE1", "T"]


def test_segment_protocol(tmp_path):
    proc = run_or_skip("segment", stdin="花が咲くよ\n")
    assert proc.returncode == 0, proc.stderr
    words = proc.stdout.strip().split(" ")
    assert "".join(words) == "花が咲くよ"


def test_readings_schema(tmp_path):
    words = tmp_path / "words.txt"
    words.write_text("花\n咲\n", encoding="utf-8")
    out = tmp_path / "readings.tsv"
    proc = run_or_skip("readings", str(words), str(out))
    assert proc.returncode == 0, proc.stderr
    from sv2svt.moras import parse_reading_dictionary

    table = parse_reading_dictionary(out.read_text(encoding="utf-8"))
    assert "花" in table
