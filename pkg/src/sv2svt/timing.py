"""Timed phoneme labels and syllable-level note events.

A note covers one syllable: its onset is the start of the syllable's first
phoneme and its duration runs to the end of the syllable's last phoneme.
Gaps between phonemes inside a syllable are absorbed; gaps between syllables
become rests.  All times are seconds at fixed microsecond resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import Sv2SvtError
from .phonology import (
    NoNucleusError,
    Phoneme,
    Syllable,
    WordSyllables,
    syllabify_words,
)


def q6(seconds: float) -> float:
    """Quantize to microsecond resolution; interchange text has 6 decimals."""
    return round(seconds, 6)


def format_seconds(seconds: float) -> str:
    return f"{seconds:.6f}"


class LabelParseError(Sv2SvtError):
    """Malformed timed-label input (bad fields, negative or unordered times)."""


class PhonemeMismatchError(Sv2SvtError):
    """Aligner phonemes disagree with the supplied syllabification."""

    def __init__(self, word_index: int, message: str):
        self.word_index = word_index
        super().__init__(f"word {word_index}: {message}")


@dataclass(frozen=True)
class TimedPhoneme:
    phoneme: Phoneme
    start_s: float
    end_s: float
    word_index: int


@dataclass(frozen=True)
class Gap:
    """A silence span reported by the aligner (``SIL`` rows)."""

    start_s: float
    end_s: float


@dataclass(frozen=True)
class SyllableNote:
    """One note event; ``lyric`` stays None until lyric assignment."""

    onset_s: float
    duration_s: float
    syllable: Syllable
    word_index: int
    lyric: str | None = None
    merged_words: tuple[int, ...] = ()

    @property
    def end_s(self) -> float:
        return q6(self.onset_s + self.duration_s)

    def with_lyric(self, lyric: str) -> "SyllableNote":
        return replace(self, lyric=lyric)


def parse_timed_labels(text: str) -> tuple[list[TimedPhoneme], list[Gap]]:
    """Parse tab-separated ``start end phoneme word_index`` label rows.

    ``SIL`` rows are dropped from the phoneme stream but returned as gap
    markers.  Rows must be monotonically ordered by start time; violations
    raise :class:`LabelParseError` with the line number.
    """
    phonemes: list[TimedPhoneme] = []
    gaps: list[Gap] = []
    prev_start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise LabelParseError(
                f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}"
            )
        try:
            start, end = q6(float(fields[0])), q6(float(fields[1]))
        except ValueError:
            raise LabelParseError(f"line {lineno}: non-numeric time") from None
        if start < 0 or end < 0:
            raise LabelParseError(f"line {lineno}: negative time")
        if end <= start:
            raise LabelParseError(f"line {lineno}: end must exceed start")
        if prev_start is not None and start < prev_start:
            raise LabelParseError(
                f"line {lineno}: non-monotonic start time {start:.6f}"
            )
        prev_start = start
        symbol = fields[2].strip()
        if symbol == "SIL":
            gaps.append(Gap(start, end))
            continue
        try:
            word_index = int(fields[3])
        except ValueError:
            raise LabelParseError(f"line {lineno}: bad word index") from None
        if word_index < 0:
            raise LabelParseError(f"line {lineno}: negative word index")
        phonemes.append(TimedPhoneme(Phoneme.parse(symbol), start, end, word_index))
    return phonemes, gaps


def group_by_word(timed: list[TimedPhoneme]) -> list[tuple[int, list[TimedPhoneme]]]:
    """Contiguous word groups in stream order."""
    groups: list[tuple[int, list[TimedPhoneme]]] = []
    for tp in timed:
        if groups and groups[-1][0] == tp.word_index:
            groups[-1][1].append(tp)
        else:
            groups.append((tp.word_index, [tp]))
    return groups


def _symbols(phonemes) -> list[str]:
    return [p.symbol for p in phonemes]


def build_notes(
    timed: list[TimedPhoneme],
    syllabification: list[WordSyllables],
) -> list[SyllableNote]:
    """Turn timed phonemes plus a per-word syllabification into notes.

    The k-th entry of ``syllabification`` describes the k-th word group of
    the label stream; symbols must match in order (stress digits are ignored
    for matching, the syllabification's phonemes win).  Vowel-less words that
    were folded into a neighbor (empty syllable tuple) contribute their timed
    phonemes to the host syllable's span.
    """
    groups = group_by_word(timed)
    if len(groups) != len(syllabification):
        raise PhonemeMismatchError(
            groups[len(syllabification)][0] if len(groups) > len(syllabification)
            else syllabification[len(groups)].word_index,
            f"label stream has {len(groups)} word groups, "
            f"syllabification has {len(syllabification)}",
        )

    # Validate symbol agreement word by word before consuming anything.
    # Vowel-less words and their hosts are skipped here (their phonemes
    # straddle word boundaries); the span walk below still covers them.
    flat_timed: list[TimedPhoneme] = []
    for (word_index, group), ws in zip(groups, syllabification):
        flat_timed.extend(group)
        if not ws.syllables or ws.merged_from:
            continue
        expected = [s for syl in ws.syllables for s in _symbols(syl.phonemes)]
        got = _symbols(tp.phoneme for tp in group)
        if expected != got:
            raise PhonemeMismatchError(
                word_index,
                f"aligned phonemes {' '.join(got)} != expected {' '.join(expected)}",
            )

    # Walk syllable spans over the flattened stream.
    notes: list[SyllableNote] = []
    pos = 0
    for ws in syllabification:
        for syl in ws.syllables:
            span = flat_timed[pos : pos + len(syl.phonemes)]
            if len(span) != len(syl.phonemes) or _symbols(
                tp.phoneme for tp in span
            ) != _symbols(syl.phonemes):
                raise PhonemeMismatchError(
                    ws.word_index,
                    "aligned phoneme stream does not cover syllabification "
                    f"(at syllable {syl.render()})",
                )
            pos += len(syl.phonemes)
            onset = span[0].start_s
            duration = q6(span[-1].end_s - onset)
            notes.append(
                SyllableNote(
                    onset_s=onset,
                    duration_s=duration,
                    syllable=syl,
                    word_index=ws.word_index,
                    merged_words=ws.merged_from,
                )
            )
    if pos != len(flat_timed):
        raise PhonemeMismatchError(
            syllabification[-1].word_index if syllabification else 0,
            f"{len(flat_timed) - pos} trailing aligned phonemes not covered",
        )
    return notes


def notes_from_alignment(timed: list[TimedPhoneme]) -> list[SyllableNote]:
    """Build notes directly from aligner phonemes (the preferred path).

    Syllabifies each word group's own phonemes, so no dictionary agreement is
    required; vowel-less words fold into neighbors per the line rule.
    """
    groups = group_by_word(timed)
    word_phonemes = [[tp.phoneme for tp in group] for _, group in groups]
    if not word_phonemes:
        return []
    try:
        per_word = syllabify_words(word_phonemes)
    except NoNucleusError:
        raise NoNucleusError(
            "alignment contains no vowel phoneme; cannot form notes"
        ) from None
    # syllabify_words indexes words positionally; restore label word indices
    relabeled = [
        WordSyllables(groups[i][0], ws.syllables,
                      tuple(groups[j][0] for j in ws.merged_from))
        for i, ws in enumerate(per_word)
    ]
    return build_notes(timed, relabeled)
