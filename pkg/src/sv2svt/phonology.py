"""English phonology: ARPAbet pronunciation dictionaries and syllabification.

Words are segmented into syllables by two rules: every vowel phoneme is the
nucleus of its own syllable, and each consonant joins the vowel it is closest
to (counted in phonemes), drifting rightward on ties.  Because the left/right
preference flips at most once inside any consonant cluster, the result is
always a contiguous partition of the input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import Sv2SvtError

# Closed ARPAbet vowel inventory; everything else in the symbol set is a
# consonant and never carries a stress digit.
VOWELS = frozenset(
    "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
)
CONSONANTS = frozenset(
    "B CH D DH F G HH JH K L M N NG P R S SH T TH V W Y Z ZH".split()
)
ARPABET = VOWELS | CONSONANTS

_VARIANT_RE = re.compile(r"^(?P<word>.+?)\((?P<variant>\d+)\)$")


class DictionaryParseError(Sv2SvtError):
    """Malformed pronunciation dictionary input."""


class UnknownPhonemeError(DictionaryParseError):
    """A symbol outside the ARPAbet inventory was encountered."""


class NoNucleusError(Sv2SvtError):
    """A phoneme sequence without any vowel cannot be syllabified."""


class OOVError(Sv2SvtError):
    """A word is missing from the pronunciation dictionary."""

    def __init__(self, words):
        self.words = list(words)
        super().__init__("out-of-vocabulary word(s): " + ", ".join(self.words))


@dataclass(frozen=True)
class Phoneme:
    """One ARPAbet phoneme; vowels carry an optional stress digit 0-2."""

    symbol: str
    stress: int | None = None

    @property
    def is_vowel(self) -> bool:
        return self.symbol in VOWELS

    @classmethod
    def parse(cls, token: str) -> "Phoneme":
        """Parse a token like ``UW1`` or ``B`` into a Phoneme."""
        stress = None
        symbol = token
        if token and token[-1].isdigit():
            symbol, stress = token[:-1], int(token[-1])
        if symbol not in ARPABET:
            raise UnknownPhonemeError(f"unknown ARPAbet symbol: {token!r}")
        if stress is not None and symbol not in VOWELS:
            raise UnknownPhonemeError(
                f"stress digit on non-vowel symbol: {token!r}"
            )
        if stress is not None and stress > 2:
            raise UnknownPhonemeError(f"stress digit out of range: {token!r}")
        return cls(symbol, stress)

    def render(self) -> str:
        """Inverse of :meth:`parse`."""
        return self.symbol if self.stress is None else f"{self.symbol}{self.stress}"


def parse_phonemes(tokens) -> list[Phoneme]:
    return [Phoneme.parse(t) for t in tokens]


@dataclass(frozen=True)
class Syllable:
    """A contiguous phoneme run containing exactly one vowel (the nucleus)."""

    phonemes: tuple[Phoneme, ...]
    nucleus_index: int

    def __post_init__(self):
        vowels = [i for i, p in enumerate(self.phonemes) if p.is_vowel]
        if vowels != [self.nucleus_index]:
            raise ValueError(
                f"syllable must contain exactly one vowel at nucleus_index, "
                f"got vowels at {vowels}"
            )

    @property
    def nucleus(self) -> Phoneme:
        return self.phonemes[self.nucleus_index]

    def compact(self) -> str:
        """Syllable as concatenated symbols without stress, e.g. ``BLUW``."""
        return "".join(p.symbol for p in self.phonemes)

    def render(self) -> str:
        """Space-separated symbols with stress, e.g. ``B L UW1``."""
        return " ".join(p.render() for p in self.phonemes)

    @classmethod
    def from_phonemes(cls, phonemes) -> "Syllable":
        phonemes = tuple(phonemes)
        vowels = [i for i, p in enumerate(phonemes) if p.is_vowel]
        if len(vowels) != 1:
            raise ValueError(f"expected exactly one vowel, got {len(vowels)}")
        return cls(phonemes, vowels[0])


@dataclass(frozen=True)
class PronunciationEntry:
    """A headword with one pronunciation variant (variant 0 is primary)."""

    word: str
    variant: int
    phonemes: tuple[Phoneme, ...]

    def render(self) -> str:
        head = self.word if self.variant == 0 else f"{self.word}({self.variant})"
        return f"{head}  " + " ".join(p.render() for p in self.phonemes)

    @property
    def vowel_count(self) -> int:
        return sum(1 for p in self.phonemes if p.is_vowel)


class PronunciationDictionary:
    """Read-only word -> pronunciation variants lookup."""

    def __init__(self, entries: dict[str, list[PronunciationEntry]]):
        self._entries = entries

    def __contains__(self, word: str) -> bool:
        return word.upper() in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def variants(self, word: str) -> list[PronunciationEntry]:
        key = word.upper()
        if key not in self._entries:
            raise OOVError([word])
        return self._entries[key]

    def primary(self, word: str) -> PronunciationEntry:
        return self.variants(word)[0]

    def words(self):
        return self._entries.keys()

    def render(self) -> str:
        """Serialize back to dictionary text (sorted by word, then variant)."""
        lines = []
        for word in sorted(self._entries):
            for entry in self._entries[word]:
                lines.append(entry.render())
        return "\n".join(lines) + "\n"


def parse_pronunciation_dictionary(text: str) -> PronunciationDictionary:
    """Parse CMUdict-format text into a lookup table.

    Lines are ``WORD  PH PH PH`` with ``WORD(n)`` marking variant n; comment
    lines start with ``;;;``.  Raises :class:`DictionaryParseError` with the
    offending line number for malformed lines and
    :class:`UnknownPhonemeError` for symbols outside ARPAbet.
    """
    entries: dict[str, list[PronunciationEntry]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise DictionaryParseError(
                f"line {lineno}: entry has no phonemes: {raw!r}"
            )
        head, tokens = fields[0], fields[1:]
        m = _VARIANT_RE.match(head)
        if m:
            word, variant = m.group("word").upper(), int(m.group("variant"))
        else:
            word, variant = head.upper(), 0
        try:
            phonemes = tuple(parse_phonemes(tokens))
        except UnknownPhonemeError as exc:
            raise UnknownPhonemeError(f"line {lineno}: {exc}") from None
        group = entries.setdefault(word, [])
        group.append(PronunciationEntry(word, variant, phonemes))
    for group in entries.values():
        group.sort(key=lambda e: e.variant)
    return PronunciationDictionary(entries)


def syllabify(phonemes) -> list[Syllable]:
    """Partition a phoneme sequence into syllables.

    Every vowel forms a nucleus; each consonant joins the nearest vowel,
    measured in phoneme positions, with ties broken toward the right vowel.
    Raises :class:`NoNucleusError` when the sequence has no vowel.
    """
    phonemes = list(phonemes)
    vowel_idx = [i for i, p in enumerate(phonemes) if p.is_vowel]
    if not vowel_idx:
        raise NoNucleusError(
            "no vowel in phoneme sequence: "
            + " ".join(p.render() for p in phonemes)
        )
    # Split points between consecutive nuclei: consonant at i goes left when
    # strictly closer to the left vowel (2i < l + r), right otherwise.
    boundaries = [0]
    for left, right in zip(vowel_idx, vowel_idx[1:]):
        split = left + 1
        while split < right and 2 * split < left + right:
            split += 1
        boundaries.append(split)
    boundaries.append(len(phonemes))
    return [
        Syllable.from_phonemes(phonemes[a:b])
        for a, b in zip(boundaries, boundaries[1:])
    ]


_PUNCT_STRIP = re.compile(r"^[^\w']+|[^\w']+$")


def normalize_word(token: str) -> str:
    """Uppercase a transcript token and trim surrounding punctuation."""
    return _PUNCT_STRIP.sub("", token).upper()


def line_words(line: str) -> list[str]:
    return [w for w in (normalize_word(t) for t in line.split()) if w]


@dataclass(frozen=True)
class WordSyllables:
    """Per-word syllabification within a line.

    ``merged_from`` lists indices of adjacent vowel-less words whose phonemes
    were folded into one of this word's syllables.
    """

    word_index: int
    syllables: tuple[Syllable, ...]
    merged_from: tuple[int, ...] = ()


def syllabify_words(
    word_phonemes: list[list[Phoneme]],
) -> list[WordSyllables]:
    """Syllabify a sequence of words, folding vowel-less words into neighbors.

    A word without any vowel (e.g. "HMM", initialisms pronounced as bare
    consonants) is prepended to the following word's first syllable when one
    exists, otherwise appended to the preceding word's last syllable, and the
    host word is flagged via ``merged_from``.  A line made up entirely of
    vowel-less words raises :class:`NoNucleusError`.
    """
    per_word: list[list[Syllable] | None] = []
    for phonemes in word_phonemes:
        try:
            per_word.append(syllabify(phonemes))
        except NoNucleusError:
            per_word.append(None)
    if all(s is None for s in per_word) and per_word:
        raise NoNucleusError("no vowel in any word of the line")

    merged_into: dict[int, list[int]] = {}
    pending: list[int] = []  # vowel-less word indices awaiting a host
    for i, syls in enumerate(per_word):
        if syls is None:
            pending.append(i)
            continue
        if pending:
            extra = [p for j in pending for p in word_phonemes[j]]
            syls[0] = Syllable.from_phonemes(tuple(extra) + syls[0].phonemes)
            merged_into.setdefault(i, []).extend(pending)
            pending = []
    if pending:
        # Trailing vowel-less words attach to the last vowel-bearing word.
        host = max(i for i, s in enumerate(per_word) if s is not None)
        syls = per_word[host]
        extra = [p for j in pending for p in word_phonemes[j]]
        syls[-1] = Syllable.from_phonemes(syls[-1].phonemes + tuple(extra))
        merged_into.setdefault(host, []).extend(pending)

    out = []
    for i, syls in enumerate(per_word):
        if syls is None:
            out.append(WordSyllables(i, ()))
        else:
            out.append(WordSyllables(i, tuple(syls), tuple(merged_into.get(i, ()))))
    return out


def count_syllables(
    line: str,
    dictionary: PronunciationDictionary,
    oov: str = "error",
) -> int:
    """Count sung syllables of a transcript line via variant-0 pronunciations.

    Equals the sum of per-word vowel counts whenever the line contains a
    vowel; vowel-less words merge into a neighboring syllable and add
    nothing.  ``oov="skip"`` counts an unknown word as one syllable instead
    of raising :class:`OOVError`.
    """
    words = line_words(line)
    if not words:
        return 0
    missing = [w for w in words if w not in dictionary]
    if missing and oov == "error":
        raise OOVError(missing)
    skipped = len(missing)
    phoneme_lists = [
        list(dictionary.primary(w).phonemes) for w in words if w in dictionary
    ]
    if not phoneme_lists:
        return skipped
    try:
        per_word = syllabify_words(phoneme_lists)
    except NoNucleusError:
        # Entirely vowel-less line: one flagged sung event.
        return 1 + skipped
    return sum(len(w.syllables) for w in per_word) + skipped
