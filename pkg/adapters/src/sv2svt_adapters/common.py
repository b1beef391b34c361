"""Shared plumbing: manifests, exit conventions, WAV decoding, JSON output."""

from __future__ import annotations

import json
import sys
import wave
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__

SCHEMA_VERSION = "1"

EXIT_USAGE = 2
EXIT_RUNTIME = 3


@dataclass(frozen=True)
class AdapterManifest:
    stage: str
    model: str
    version: str
    input_format: str
    output_format: str

    def emit(self) -> None:
        print(json.dumps(asdict(self), sort_keys=True))


def fail(message: str) -> "NoReturn":  # noqa: F821
    print(message, file=sys.stderr)
    sys.exit(EXIT_RUNTIME)


def format_seconds(seconds: float) -> str:
    return f"{seconds:.6f}"


def canonical_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def read_wav_mono(path: Path) -> tuple[np.ndarray, int]:
    """Decode a 16-bit PCM WAV file to float32 mono in [-1, 1].

    The reference adapters only accept WAV so they stay free of external
    audio decoders; anything else exits with a runtime diagnostic.
    """
    try:
        with wave.open(str(path), "rb") as handle:
            channels = handle.getnchannels()
            width = handle.getsampwidth()
            rate = handle.getframerate()
            frames = handle.readframes(handle.getnframes())
    except (OSError, wave.Error, EOFError) as exc:
        fail(f"cannot decode WAV file {path}: {exc}")
    if width != 2:
        fail(f"only 16-bit PCM WAV is supported, got sample width {width}")
    samples = np.frombuffer(frames, dtype="<i2").astype(np.float32) / 32768.0
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1)
    return samples, rate
