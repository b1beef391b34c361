"""Lyrics transcription adapter wrapping a Whisper-style speech recognizer.

Reads a WAV file, runs a Hugging Face ASR pipeline with 30-second chunking,
and writes transcript JSON.  The model loads lazily: a WAV that cannot be
decoded fails before any model machinery is touched.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .common import (
    AdapterManifest,
    canonical_json,
    fail,
    format_seconds,
    read_wav_mono,
)

DEFAULT_MODEL = "openai/whisper-large-v3"
CHUNK_SECONDS = 30

MANIFEST = AdapterManifest(
    stage="transcribe",
    model=DEFAULT_MODEL,
    version=__version__,
    input_format="audio-wav",
    output_format="transcript-json@1",
)


def chunks_to_lines(chunks, total_duration: float) -> list[dict]:
    """Map ASR chunks to monotone transcript lines, dropping empties."""
    lines = []
    previous_start = 0.0
    for chunk in chunks:
        text = (chunk.get("text") or "").strip()
        if not text:
            continue
        start, end = chunk.get("timestamp", (None, None))
        if start is None:
            start = previous_start
        if end is None or end <= start:
            end = min(total_duration, start + CHUNK_SECONDS)
        if end <= start:
            continue
        start = max(start, previous_start)  # enforce monotone line starts
        previous_start = start
        lines.append(
            {
                "text": text,
                "start_s": format_seconds(start),
                "end_s": format_seconds(end),
            }
        )
    return lines


def transcribe(audio_path: Path, model: str, device: str, batch_size: int) -> str:
    samples, rate = read_wav_mono(audio_path)
    duration = len(samples) / rate
    try:
        from transformers import pipeline
    except ImportError as exc:
        fail(f"transformers is required for the transcribe adapter: {exc}")
    try:
        asr = pipeline(
            "automatic-speech-recognition",
            model=model,
            device=device,
            chunk_length_s=CHUNK_SECONDS,
            batch_size=batch_size,
            return_timestamps=True,
        )
    except Exception as exc:  # model download/load failures
        fail(f"cannot load ASR model {model!r}: {exc}")
    result = asr({"raw": samples, "sampling_rate": rate})
    chunks = result.get("chunks")
    if chunks is None:
        text = (result.get("text") or "").strip()
        chunks = (
            [{"text": text, "timestamp": (0.0, duration)}] if text else []
        )
    return canonical_json(
        {"schema_version": "1", "lines": chunks_to_lines(chunks, duration)}
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sv2svt-adapter-transcribe", description=__doc__
    )
    parser.add_argument("input", nargs="?", help="input WAV file")
    parser.add_argument("output", nargs="?", help="output transcript JSON")
    parser.add_argument("--manifest", action="store_true")
    parser.add_argument("--model", default=DEFAULT_MODEL)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--batch-size", type=int, default=4)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        MANIFEST.emit()
        return 0
    if not args.input or not args.output:
        parser.error("input and output are required")
    document = transcribe(Path(args.input), args.model, args.device, args.batch_size)
    Path(args.output).write_text(document, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
