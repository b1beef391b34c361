"""Japanese mora tokenization, kanji reading resolution, and mora counting.

One kana is one mora, with the usual refinements: base kana plus small
ゃ/ゅ/ょ contract into a single mora (yoon), and the sokuon っ, the long
vowel mark ー, and ん each stand as a mora of their own.  Kanji have no
intrinsic mora count; they resolve through a reading dictionary after word
segmentation.
"""

from __future__ import annotations

import subprocess
import unicodedata
from dataclasses import dataclass
from enum import Enum

from .errors import Sv2SvtError

_SMALL_YAYUYO = set("ゃゅょャュョ")
_SMALL_VOWELS = set("ぁぃぅぇぉゎァィゥェォヮ")
_SOKUON = set("っッ")
_MORAIC_N = set("んン")
_CHOON = "ー"
_SPACES = set(" 　")

# Characters silently dropped during reading resolution; they carry no mora.
_PUNCTUATION = set(
    "、。，．・「」『』【】（）()［］[]｛｝{}！？!?.,:;…‥〜~－—‐\"'“”‘’"
)


class NotKanaError(Sv2SvtError):
    """Input contains characters outside the kana inventory."""


class TokenizationError(Sv2SvtError):
    """Kana sequence cannot be tokenized (e.g. leading small kana)."""


class UnknownReadingError(Sv2SvtError):
    """A kanji word has no entry in the reading dictionary."""

    def __init__(self, word: str):
        self.word = word
        super().__init__(f"no reading for kanji word: {word!r}")


class SegmenterError(Sv2SvtError):
    """The word-segmentation adapter failed."""


class TokenKind(Enum):
    PLAIN = "plain"
    YOON = "yoon"
    SOKUON = "sokuon"
    CHOON = "choon"
    MORAIC_N = "moraic_n"


@dataclass(frozen=True)
class KanaToken:
    """One mora of kana text (1-2 code points)."""

    surface: str
    kind: TokenKind


def _is_kana_letter(ch: str) -> bool:
    code = ord(ch)
    if 0x3041 <= code <= 0x3096:  # hiragana ぁ..ゖ
        return True
    if 0x30A1 <= code <= 0x30FA:  # katakana ァ..ヴ plus ヵヶ
        return True
    return False


def is_kanji(ch: str) -> bool:
    code = ord(ch)
    return (
        0x4E00 <= code <= 0x9FFF
        or 0x3400 <= code <= 0x4DBF
        or 0xF900 <= code <= 0xFAFF
        or ch == "々"
    )


def tokenize_kana(text: str) -> list[KanaToken]:
    """Tokenize a pure-kana string into moras.

    Accepts hiragana, katakana, the long vowel mark and spaces (skipped).
    Raises :class:`NotKanaError` for anything else and
    :class:`TokenizationError` for small kana with nothing to attach to.
    """
    text = unicodedata.normalize("NFC", text)
    tokens: list[KanaToken] = []
    for ch in text:
        if ch in _SPACES:
            continue
        if ch == _CHOON:
            tokens.append(KanaToken(ch, TokenKind.CHOON))
            continue
        if not _is_kana_letter(ch):
            raise NotKanaError(f"not a kana character: {ch!r}")
        if ch in _SMALL_YAYUYO or ch in _SMALL_VOWELS:
            prev = tokens[-1] if tokens else None
            if (
                prev is None
                or prev.kind is not TokenKind.PLAIN
                or len(prev.surface) != 1
            ):
                raise TokenizationError(
                    f"small kana {ch!r} has no base kana to attach to"
                )
            kind = TokenKind.YOON if ch in _SMALL_YAYUYO else TokenKind.PLAIN
            tokens[-1] = KanaToken(prev.surface + ch, kind)
            continue
        if ch in _SOKUON:
            tokens.append(KanaToken(ch, TokenKind.SOKUON))
        elif ch in _MORAIC_N:
            tokens.append(KanaToken(ch, TokenKind.MORAIC_N))
        else:
            tokens.append(KanaToken(ch, TokenKind.PLAIN))
    return tokens


@dataclass(frozen=True)
class MoraReading:
    """A Japanese surface string with its kana reading split into moras."""

    surface: str
    reading: tuple[KanaToken, ...]

    @property
    def mora_count(self) -> int:
        return len(self.reading)

    @property
    def kana(self) -> str:
        return "".join(t.surface for t in self.reading)


class ReadingDictionary:
    """Kanji word -> ordered hiragana readings; the first is the default."""

    def __init__(self, readings: dict[str, list[str]]):
        for surface, variants in readings.items():
            if not variants:
                raise ValueError(f"no readings for {surface!r}")
            for r in variants:
                tokenize_kana(r)  # readings must be pure kana
        self._readings = dict(readings)

    def __contains__(self, word: str) -> bool:
        return word in self._readings

    def __len__(self) -> int:
        return len(self._readings)

    def readings(self, word: str) -> list[str]:
        if word not in self._readings:
            raise UnknownReadingError(word)
        return list(self._readings[word])

    def default(self, word: str) -> str:
        return self.readings(word)[0]

    @classmethod
    def empty(cls) -> "ReadingDictionary":
        return cls({})

    def merged_with(self, other: "ReadingDictionary") -> "ReadingDictionary":
        """Entries of ``other`` override ours on collision."""
        merged = dict(self._readings)
        merged.update(other._readings)
        return ReadingDictionary(merged)


def parse_reading_dictionary(text: str) -> ReadingDictionary:
    """Parse TSV lines ``surface<TAB>reading1<TAB>reading2...``."""
    readings: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [unicodedata.normalize("NFC", f.strip()) for f in line.split("\t")]
        if len(fields) < 2 or not all(fields):
            raise Sv2SvtError(
                f"reading dictionary line {lineno}: expected "
                f"'surface<TAB>reading...', got {raw!r}"
            )
        try:
            for r in fields[1:]:
                tokenize_kana(r)
        except (NotKanaError, TokenizationError) as exc:
            raise Sv2SvtError(
                f"reading dictionary line {lineno}: reading not pure kana: {exc}"
            ) from None
        readings[fields[0]] = fields[1:]
    return ReadingDictionary(readings)


class Segmenter:
    """Word segmentation interface: one sentence in, a word partition out."""

    def segment(self, text: str) -> list[str]:
        raise NotImplementedError


class KanjiRunSegmenter(Segmenter):
    """Fallback segmenter: maximal kanji runs become single words, as do the
    non-kanji runs between them."""

    def segment(self, text: str) -> list[str]:
        words: list[str] = []
        current = ""
        current_kanji = None
        for ch in text:
            kanji = is_kanji(ch)
            if current and kanji == current_kanji:
                current += ch
            else:
                if current:
                    words.append(current)
                current, current_kanji = ch, kanji
        if current:
            words.append(current)
        return words


class SubprocessSegmenter(Segmenter):
    """Line-in/line-out subprocess segmenter (space-separated words out).

    One process per call; instances are not reentrant, callers serialize.
    """

    def __init__(self, command: list[str], timeout_s: float = 60.0):
        self.command = list(command)
        self.timeout_s = timeout_s

    def segment(self, text: str) -> list[str]:
        line = text.replace("\n", " ").strip()
        try:
            proc = subprocess.run(
                self.command,
                input=line + "\n",
                capture_output=True,
                text=True,
                timeout=self.timeout_s,
            )
        except subprocess.TimeoutExpired:
            raise SegmenterError(
                f"segmenter timed out after {self.timeout_s}s"
            ) from None
        except OSError as exc:
            raise SegmenterError(f"segmenter failed to start: {exc}") from None
        if proc.returncode != 0:
            raise SegmenterError(
                f"segmenter exited {proc.returncode}: {proc.stderr.strip()}"
            )
        out = proc.stdout.splitlines()
        if not out:
            raise SegmenterError("segmenter produced no output line")
        return [w for w in out[0].split(" ") if w]


def resolve_readings(
    text: str,
    segmenter: Segmenter,
    dictionary: ReadingDictionary,
) -> MoraReading:
    """Resolve a mixed Japanese string to a kana mora reading.

    The segmenter partitions the text into words; kanji words take their
    default dictionary reading, kana passes through, punctuation and spaces
    are dropped.  Raises :class:`UnknownReadingError` for kanji words missing
    from the dictionary and :class:`NotKanaError` for non-Japanese residue.
    """
    normalized = unicodedata.normalize("NFC", text)
    pieces: list[str] = []
    for word in segmenter.segment(normalized):
        cleaned = "".join(
            ch for ch in word if ch not in _PUNCTUATION and ch not in _SPACES
        )
        if not cleaned:
            continue
        if any(is_kanji(ch) for ch in cleaned):
            pieces.append(dictionary.default(cleaned))
        else:
            pieces.append(cleaned)
    reading = tokenize_kana("".join(pieces))
    return MoraReading(surface=text, reading=tuple(reading))


def count_moras(
    text: str,
    segmenter: Segmenter,
    dictionary: ReadingDictionary,
) -> int:
    return resolve_readings(text, segmenter, dictionary).mora_count


class ReadingResolver:
    """Bundles a segmenter and dictionary into a single resolve service."""

    def __init__(self, segmenter: Segmenter | None = None,
                 dictionary: ReadingDictionary | None = None):
        self.segmenter = segmenter or KanjiRunSegmenter()
        self.dictionary = dictionary or ReadingDictionary.empty()

    def resolve(self, text: str) -> MoraReading:
        return resolve_readings(text, self.segmenter, self.dictionary)
