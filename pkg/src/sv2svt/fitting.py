"""Translation candidate selection and mora-to-note lyric assignment.

A candidate qualifies when its mora count does not exceed the target
syllable count; among qualifiers the smallest deficit wins, ties broken by
higher beam score and then earlier list position.  When nothing qualifies
the least overshoot wins instead and the result is flagged as a fallback.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Sv2SvtError
from .moras import MoraReading, ReadingResolver
from .timing import SyllableNote

CONTINUATION_LYRIC = "+"


class NoCandidatesError(Sv2SvtError):
    """select_candidate was given an empty candidate list."""


class UnreadableCandidatesError(Sv2SvtError):
    """Every candidate failed kanji reading resolution."""

    def __init__(self, diagnostics: list[tuple[str, str]]):
        self.diagnostics = diagnostics
        detail = "; ".join(f"{text!r}: {err}" for text, err in diagnostics)
        super().__init__(f"no readable candidate: {detail}")


class MoraOverflowError(Sv2SvtError):
    """More moras than notes; only reachable through fallback selection."""


@dataclass
class TranslationCandidate:
    text: str
    beam_score: float
    reading: MoraReading | None = None  # resolved lazily


@dataclass(frozen=True)
class FitResult:
    chosen: TranslationCandidate
    target_syllables: int
    mora_count: int
    deficit: int  # target - moras; negative only when fallback_used
    fallback_used: bool


def select_candidate(
    candidates: list[TranslationCandidate],
    target_syllables: int,
    resolver: ReadingResolver,
) -> FitResult:
    """Pick the candidate whose mora count best fits the syllable count.

    Candidates whose readings cannot be resolved are skipped; if all fail a
    :class:`UnreadableCandidatesError` carries per-candidate diagnostics.
    """
    if not candidates:
        raise NoCandidatesError("candidate list is empty")
    if target_syllables < 1:
        raise ValueError(f"target_syllables must be >= 1, got {target_syllables}")

    readable: list[tuple[int, TranslationCandidate]] = []
    failures: list[tuple[str, str]] = []
    for i, cand in enumerate(candidates):
        if cand.reading is None:
            try:
                cand.reading = resolver.resolve(cand.text)
            except Sv2SvtError as exc:
                failures.append((cand.text, str(exc)))
                continue
        readable.append((i, cand))
    if not readable:
        raise UnreadableCandidatesError(failures)

    best = None  # (deficit-or-overshoot, -score, position, candidate)
    best_fallback = None
    for pos, cand in readable:
        moras = cand.reading.mora_count
        deficit = target_syllables - moras
        if deficit >= 0:
            key = (deficit, -cand.beam_score, pos)
            if best is None or key < best[0]:
                best = (key, cand)
        else:
            key = (-deficit, -cand.beam_score, pos)
            if best_fallback is None or key < best_fallback[0]:
                best_fallback = (key, cand)

    if best is not None:
        chosen = best[1]
        fallback = False
    else:
        chosen = best_fallback[1]
        fallback = True
    moras = chosen.reading.mora_count
    return FitResult(
        chosen=chosen,
        target_syllables=target_syllables,
        mora_count=moras,
        deficit=target_syllables - moras,
        fallback_used=fallback,
    )


def assign_lyrics(
    notes: list[SyllableNote],
    reading: MoraReading,
    allow_overflow: bool = False,
) -> list[SyllableNote]:
    """Assign mora i to note i; surplus notes sustain with the ``+`` lyric.

    More moras than notes raises :class:`MoraOverflowError` unless
    ``allow_overflow``, which merges the surplus moras onto the final note.
    Note order, onsets and durations are preserved exactly.
    """
    surfaces = [t.surface for t in reading.reading]
    if len(surfaces) > len(notes):
        if not notes:
            raise MoraOverflowError("no notes to carry the lyrics")
        if not allow_overflow:
            raise MoraOverflowError(
                f"{len(surfaces)} moras for {len(notes)} notes; "
                "pass allow_overflow to merge the surplus onto the final note"
            )
        merged = surfaces[: len(notes) - 1] + ["".join(surfaces[len(notes) - 1 :])]
        surfaces = merged
    out = []
    for i, note in enumerate(notes):
        if i < len(surfaces):
            out.append(note.with_lyric(surfaces[i]))
        else:
            out.append(note.with_lyric(CONTINUATION_LYRIC))
    return out
