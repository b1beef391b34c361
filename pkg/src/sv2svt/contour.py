"""Frame-level melody contour and its pitch-deviation representation.

The synthesizer project keeps every note at MIDI pitch 60 and carries the
melody as a curve of semitone offsets from 60, one point per voiced frame.
Unvoiced frames (f0 = 0) emit no point; the curve holds the last voiced
value across them (step-hold, never interpolated through silence).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .errors import Sv2SvtError
from .timing import q6

BASE_PITCH = 60


class ContourParseError(Sv2SvtError):
    """Malformed contour CSV."""


class PitchDomainError(Sv2SvtError):
    """Frequency outside the domain of the pitch conversion (f0 <= 0)."""


class EmptyMelodyError(Sv2SvtError):
    """No voiced frame in the contour."""


@dataclass(frozen=True)
class PitchFrame:
    time_s: float
    f0_hz: float  # 0 means unvoiced

    @property
    def voiced(self) -> bool:
        return self.f0_hz > 0


def parse_contour(text: str) -> list[PitchFrame]:
    """Parse ``time_s,f0_hz`` CSV rows into sorted, deduplicated frames.

    A header row is optional.  Negative frequencies and duplicate timestamps
    with conflicting values raise :class:`ContourParseError`.
    """
    frames: dict[float, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 2:
            raise ContourParseError(
                f"line {lineno}: expected 'time_s,f0_hz', got {raw!r}"
            )
        try:
            time_s, f0 = q6(float(fields[0])), float(fields[1])
        except ValueError:
            if lineno == 1:
                continue  # header row
            raise ContourParseError(f"line {lineno}: non-numeric field") from None
        if f0 < 0:
            raise ContourParseError(f"line {lineno}: negative frequency {f0}")
        if time_s in frames and frames[time_s] != f0:
            raise ContourParseError(
                f"line {lineno}: duplicate timestamp {time_s:.6f} with "
                f"conflicting values"
            )
        frames[time_s] = f0
    return [PitchFrame(t, frames[t]) for t in sorted(frames)]


def hz_to_midi(f0_hz: float) -> float:
    """Equal-temperament frequency to real-valued MIDI pitch (A4 = 440 = 69)."""
    if f0_hz <= 0:
        raise PitchDomainError(f"frequency must be positive, got {f0_hz}")
    return 69.0 + 12.0 * math.log2(f0_hz / 440.0)


def midi_to_hz(pitch: float) -> float:
    return 440.0 * 2.0 ** ((pitch - 69.0) / 12.0)


@dataclass(frozen=True)
class DeviationCurve:
    """Semitone offsets from pitch 60 at strictly increasing times.

    Sampling between points uses step-hold: the value at time t is the value
    of the last point at or before t (clamped to the first point before it).
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        times = [t for t, _ in self.points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("deviation times must be strictly increasing")
        if any(not math.isfinite(v) for _, v in self.points):
            raise ValueError("deviation values must be finite")

    def value_at(self, time_s: float) -> float:
        if not self.points:
            raise EmptyMelodyError("deviation curve has no points")
        times = [t for t, _ in self.points]
        i = bisect.bisect_right(times, time_s) - 1
        return self.points[max(i, 0)][1]


def contour_to_deviation(
    frames: list[PitchFrame],
    smoothing_window: int = 0,
) -> DeviationCurve:
    """Map voiced frames to (time, midi - 60) deviation points.

    Unvoiced frames contribute no point, leaving the step-hold rule of
    :class:`DeviationCurve` to carry the last voiced value across the gap.
    ``smoothing_window`` > 1 applies a moving median over that many voiced
    points (odd window, off by default; the raw contour is the normal path).
    """
    voiced = [f for f in frames if f.voiced]
    if not voiced:
        raise EmptyMelodyError("contour has no voiced frame")
    values = [hz_to_midi(f.f0_hz) - BASE_PITCH for f in voiced]
    if smoothing_window > 1:
        values = moving_median(values, smoothing_window)
    return DeviationCurve(tuple((f.time_s, v) for f, v in zip(voiced, values)))


def moving_median(values: list[float], window: int) -> list[float]:
    """Centered moving median; the window must be odd and shrinks at edges."""
    if window % 2 == 0:
        raise ValueError(f"median window must be odd, got {window}")
    half = window // 2
    out = []
    for i in range(len(values)):
        lo, hi = max(0, i - half), min(len(values), i + half + 1)
        span = sorted(values[lo:hi])
        mid = len(span) // 2
        if len(span) % 2:
            out.append(span[mid])
        else:
            out.append((span[mid - 1] + span[mid]) / 2.0)
    return out
