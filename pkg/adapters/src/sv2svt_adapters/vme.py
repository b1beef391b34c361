"""Frame-level vocal melody extraction adapter.

Reads a WAV file and writes a ``time_s,f0_hz`` contour CSV at a fixed hop,
0 marking unvoiced frames.  The backend is a deterministic normalized
autocorrelation tracker with parabolic peak refinement; it needs no model
download, which keeps one melody route fully reproducible offline.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .common import AdapterManifest, fail, format_seconds, read_wav_mono

MANIFEST = AdapterManifest(
    stage="vme",
    model="autocorrelation-f0/1.0",
    version=__version__,
    input_format="audio-wav",
    output_format="contour-csv@1",
)


def track_f0(
    samples: np.ndarray,
    rate: int,
    hop_s: float = 0.01,
    fmin: float = 65.0,
    fmax: float = 1050.0,
    clarity: float = 0.5,
    min_rms: float = 0.01,
) -> list[tuple[float, float]]:
    hop = max(1, int(round(hop_s * rate)))
    window = int(round(max(0.04, 3.0 / fmin) * rate))
    lag_min = max(2, int(rate / fmax))
    lag_max = int(rate / fmin)
    out: list[tuple[float, float]] = []
    frame_index = 0
    while frame_index * hop + window <= len(samples):
        start = frame_index * hop
        frame = samples[start : start + window].astype(np.float64)
        time_s = round(start / rate, 6)
        frame_index += 1
        frame = frame - frame.mean()
        rms = float(np.sqrt(np.mean(frame**2)))
        if rms < min_rms:
            out.append((time_s, 0.0))
            continue
        # autocorrelation via FFT, unbiased by the shrinking overlap so the
        # finite window does not drag peaks toward shorter lags
        nfft = 1 << (2 * window - 1).bit_length()
        spectrum = np.fft.rfft(frame, nfft)
        acf = np.fft.irfft(spectrum * np.conj(spectrum), nfft)[: lag_max + 2]
        if acf[0] <= 0:
            out.append((time_s, 0.0))
            continue
        overlap = window - np.arange(len(acf))
        acf = (acf / overlap) / (acf[0] / window)
        search = acf[lag_min : lag_max + 1]
        strongest = float(search.max())
        if strongest < clarity:
            out.append((time_s, 0.0))
            continue
        # period multiples peak equally after unbiasing; take the earliest
        # local maximum close to the strongest to avoid subharmonic picks
        best = None
        for i in range(len(search)):
            left = search[i - 1] if i > 0 else acf[lag_min - 1]
            right = search[i + 1] if i + 1 < len(search) else acf[lag_max + 1]
            if search[i] >= left and search[i] >= right:
                if search[i] >= 0.85 * strongest:
                    best = i + lag_min
                    break
        if best is None:
            best = int(np.argmax(search)) + lag_min
        # parabolic interpolation around the peak for sub-sample lag
        lag = float(best)
        if 1 <= best < len(acf) - 1:
            left, mid, right = acf[best - 1], acf[best], acf[best + 1]
            denom = left - 2 * mid + right
            if denom != 0:
                lag += 0.5 * (left - right) / denom
        f0 = rate / lag
        if not fmin <= f0 <= fmax:
            out.append((time_s, 0.0))
            continue
        out.append((time_s, round(f0, 6)))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sv2svt-adapter-vme", description=__doc__)
    parser.add_argument("input", nargs="?", help="input WAV file")
    parser.add_argument("output", nargs="?", help="output contour CSV")
    parser.add_argument("--manifest", action="store_true")
    parser.add_argument("--hop-s", type=float, default=0.01)
    parser.add_argument("--fmin", type=float, default=65.0)
    parser.add_argument("--fmax", type=float, default=1050.0)
    parser.add_argument("--clarity", type=float, default=0.5)
    parser.add_argument("--min-rms", type=float, default=0.01)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        MANIFEST.emit()
        return 0
    if not args.input or not args.output:
        parser.error("input and output are required")
    samples, rate = read_wav_mono(Path(args.input))
    if args.fmin <= 0 or args.fmax <= args.fmin:
        fail(f"bad frequency range {args.fmin}..{args.fmax}")
    frames = track_f0(
        samples,
        rate,
        hop_s=args.hop_s,
        fmin=args.fmin,
        fmax=args.fmax,
        clarity=args.clarity,
        min_rms=args.min_rms,
    )
    rows = ["time_s,f0_hz"]
    rows += [f"{format_seconds(t)},{f0:.6f}" for t, f0 in frames]
    Path(args.output).write_text("\n".join(rows) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
