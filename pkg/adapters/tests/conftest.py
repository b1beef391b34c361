from __future__ import annotations

import math
import os
import struct
import subprocess
import sys
import wave
from pathlib import Path

import pytest

ADAPTERS = ("transcribe", "align", "vme", "translate", "segment", "readings")


def run_adapter(name: str, *args: str, stdin: str | None = None, env=None):
    merged = dict(os.environ)
    # fail fast instead of probing the network when model weights are absent
    merged.setdefault("HF_HUB_OFFLINE", "1")
    merged.setdefault("TRANSFORMERS_OFFLINE", "1")
    if env:
        merged.update(env)
    return subprocess.run(
        [sys.executable, "-m", f"sv2svt_adapters.{name}", *args],
        input=stdin,
        capture_output=True,
        text=True,
        env=merged,
        timeout=600,
    )


@pytest.fixture()
def adapter_runner():
    return run_adapter


def write_sine_wav(
    path: Path,
    frequency: float = 440.0,
    duration_s: float = 1.0,
    rate: int = 16000,
    amplitude: float = 0.6,
    leading_silence_s: float = 0.2,
) -> Path:
    n_silence = int(leading_silence_s * rate)
    n_tone = int(duration_s * rate)
    samples = [0.0] * n_silence + [
        amplitude * math.sin(2 * math.pi * frequency * i / rate)
        for i in range(n_tone)
    ]
    with wave.open(str(path), "wb") as handle:
        handle.setnchannels(1)
        handle.setsampwidth(2)
        handle.setframerate(rate)
        handle.writeframes(
            b"".join(struct.pack("<h", int(s * 32767)) for s in samples)
        )
    return path


@pytest.fixture()
def sine_wav(tmp_path):
    return write_sine_wav(tmp_path / "tone.wav")
