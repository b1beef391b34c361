"""Readers and writers for every pipeline interchange format.

JSON documents are written canonically: keys sorted, seconds as fixed
6-decimal strings, UTF-8 text with LF endings, so equal payloads are
byte-identical.  Parsing accepts canonical documents plus the obvious
semantic equivalents (numeric seconds, unsorted keys).  Schema violations
report the offending field path.

Formats (all ``schema_version`` "1"):

* project JSON   - the final synthesizer project (notes at base pitch 60,
  pitch deviation curve, metadata)
* transcript JSON - lines of text with start/end seconds
* notes JSON     - syllable note events, lyric optional
* candidates JSON - translation candidates with beam scores and the target
  syllable count
* deviation JSON - semitone offsets from pitch 60 over time
* labels TSV / contour CSV - parsed by :mod:`sv2svt.timing` and
  :mod:`sv2svt.contour`; re-exported here for validation
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

from .contour import DeviationCurve, parse_contour
from .errors import Sv2SvtError
from .fitting import TranslationCandidate
from .phonology import Syllable, parse_phonemes
from .timing import SyllableNote, format_seconds, parse_timed_labels, q6

SCHEMA_VERSION = "1"
BASE_PITCH = 60
UST_TICKS_PER_QUARTER = 480
UST_PITCH_INTERVAL_S = 0.005  # Mode1 pitch points every 5 ms, in cents


class SchemaError(Sv2SvtError):
    """A document violates its schema; the message names the field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ProjectValidationError(Sv2SvtError):
    """A project violates its invariants; raised before any bytes are written."""


class ExportWarning(UserWarning):
    """Lossy but recoverable export condition (e.g. sub-tick note clamped)."""


@dataclass(frozen=True)
class ProjectMetadata:
    source_text: str = ""
    target_text: str = ""
    tool_version: str = ""


@dataclass(frozen=True)
class SynthProject:
    """The synthesizer-ready payload: lyric-filled notes at pitch 60 plus a
    frame-level deviation curve."""

    notes: tuple[SyllableNote, ...]
    deviation: DeviationCurve
    metadata: ProjectMetadata = field(default_factory=ProjectMetadata)
    base_pitch: int = BASE_PITCH


def validate_project(project: SynthProject) -> None:
    if project.base_pitch != BASE_PITCH:
        raise ProjectValidationError(
            f"base_pitch must be {BASE_PITCH}, got {project.base_pitch}"
        )
    if not project.notes:
        raise ProjectValidationError("project has no notes")
    prev_onset = None
    word_end: dict[int, float] = {}
    for i, note in enumerate(project.notes):
        if note.onset_s < 0:
            raise ProjectValidationError(f"notes[{i}]: negative onset")
        if note.duration_s <= 0:
            raise ProjectValidationError(f"notes[{i}]: non-positive duration")
        if not note.lyric:
            raise ProjectValidationError(f"notes[{i}]: empty lyric")
        if note.word_index < 0:
            raise ProjectValidationError(f"notes[{i}]: negative word index")
        if prev_onset is not None and note.onset_s < prev_onset:
            raise ProjectValidationError(f"notes[{i}]: notes not sorted by onset")
        prev_onset = note.onset_s
        last_end = word_end.get(note.word_index)
        if last_end is not None and note.onset_s < last_end:
            raise ProjectValidationError(
                f"notes[{i}]: overlaps previous note of word {note.word_index}"
            )
        word_end[note.word_index] = note.end_s
    # DeviationCurve enforces ordering/finiteness on construction.


# ---------------------------------------------------------------------------
# JSON plumbing
# ---------------------------------------------------------------------------

def canonical_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def _load(document: str, kind: str) -> dict:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(kind, f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError(kind, "top level must be an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"{kind}.schema_version", f"expected {SCHEMA_VERSION!r}, got {version!r}"
        )
    return data


def _field(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing field")
    return obj[key]


def _string(obj: dict, key: str, path: str) -> str:
    value = _field(obj, key, path)
    if not isinstance(value, str):
        raise SchemaError(f"{path}.{key}", f"expected string, got {type(value).__name__}")
    return value


def _integer(obj: dict, key: str, path: str) -> int:
    value = _field(obj, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{path}.{key}", f"expected integer, got {value!r}")
    return value


def _seconds(obj: dict, key: str, path: str) -> float:
    value = _field(obj, key, path)
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise SchemaError(f"{path}.{key}", f"bad seconds value {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}.{key}", f"expected seconds, got {value!r}")
    if not math.isfinite(value):
        raise SchemaError(f"{path}.{key}", "seconds must be finite")
    return q6(float(value))


def _array(obj: dict, key: str, path: str) -> list:
    value = _field(obj, key, path)
    if not isinstance(value, list):
        raise SchemaError(f"{path}.{key}", f"expected array, got {type(value).__name__}")
    return value


# ---------------------------------------------------------------------------
# Notes and projects
# ---------------------------------------------------------------------------

def note_to_payload(note: SyllableNote) -> dict:
    payload = {
        "onset_s": format_seconds(note.onset_s),
        "duration_s": format_seconds(note.duration_s),
        "syllable": note.syllable.render(),
        "word_index": note.word_index,
        "lyric": note.lyric,
    }
    if note.merged_words:
        payload["merged_words"] = list(note.merged_words)
    return payload


def note_from_payload(obj, path: str, require_lyric: bool) -> SyllableNote:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected note object")
    syllable_text = _string(obj, "syllable", path)
    try:
        syllable = Syllable.from_phonemes(parse_phonemes(syllable_text.split()))
    except (Sv2SvtError, ValueError) as exc:
        raise SchemaError(f"{path}.syllable", str(exc)) from None
    lyric = obj.get("lyric")
    if lyric is not None and not isinstance(lyric, str):
        raise SchemaError(f"{path}.lyric", f"expected string or null, got {lyric!r}")
    if require_lyric and not lyric:
        raise SchemaError(f"{path}.lyric", "lyric required")
    merged = obj.get("merged_words", [])
    if not isinstance(merged, list) or not all(
        isinstance(m, int) and not isinstance(m, bool) for m in merged
    ):
        raise SchemaError(f"{path}.merged_words", "expected array of integers")
    duration = _seconds(obj, "duration_s", path)
    if duration <= 0:
        raise SchemaError(f"{path}.duration_s", "must be positive")
    return SyllableNote(
        onset_s=_seconds(obj, "onset_s", path),
        duration_s=duration,
        syllable=syllable,
        word_index=_integer(obj, "word_index", path),
        lyric=lyric,
        merged_words=tuple(merged),
    )


def deviation_to_payload(curve: DeviationCurve) -> list[dict]:
    # +0.0 folds negative zero into the canonical "0.000000" spelling
    return [
        {"time_s": format_seconds(t), "semitones": f"{round(v, 6) + 0.0:.6f}"}
        for t, v in curve.points
    ]


def deviation_from_payload(items: list, path: str) -> DeviationCurve:
    points = []
    for i, obj in enumerate(items):
        if not isinstance(obj, dict):
            raise SchemaError(f"{path}[{i}]", "expected object")
        t = _seconds(obj, "time_s", f"{path}[{i}]")
        raw = _field(obj, "semitones", f"{path}[{i}]")
        if isinstance(raw, str):
            try:
                raw = float(raw)
            except ValueError:
                raise SchemaError(
                    f"{path}[{i}].semitones", f"bad value {raw!r}"
                ) from None
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise SchemaError(f"{path}[{i}].semitones", f"expected number, got {raw!r}")
        points.append((t, round(float(raw), 6)))
    try:
        return DeviationCurve(tuple(points))
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


def write_project(project: SynthProject) -> str:
    """Serialize a project canonically; validates invariants first."""
    validate_project(project)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "base_pitch": project.base_pitch,
        "metadata": {
            "source_text": project.metadata.source_text,
            "target_text": project.metadata.target_text,
            "tool_version": project.metadata.tool_version,
        },
        "notes": [note_to_payload(n) for n in project.notes],
        "deviation": deviation_to_payload(project.deviation),
    }
    return canonical_json(payload)


def parse_project(document: str) -> SynthProject:
    data = _load(document, "project")
    base_pitch = _integer(data, "base_pitch", "project")
    meta_obj = _field(data, "metadata", "project")
    if not isinstance(meta_obj, dict):
        raise SchemaError("project.metadata", "expected object")
    metadata = ProjectMetadata(
        source_text=_string(meta_obj, "source_text", "project.metadata"),
        target_text=_string(meta_obj, "target_text", "project.metadata"),
        tool_version=_string(meta_obj, "tool_version", "project.metadata"),
    )
    notes = tuple(
        note_from_payload(obj, f"project.notes[{i}]", require_lyric=True)
        for i, obj in enumerate(_array(data, "notes", "project"))
    )
    deviation = deviation_from_payload(
        _array(data, "deviation", "project"), "project.deviation"
    )
    project = SynthProject(
        notes=notes, deviation=deviation, metadata=metadata, base_pitch=base_pitch
    )
    try:
        validate_project(project)
    except ProjectValidationError as exc:
        raise SchemaError("project", str(exc)) from None
    return project


def write_notes(notes: list[SyllableNote]) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "notes": [note_to_payload(n) for n in notes],
    }
    return canonical_json(payload)


def parse_notes(document: str) -> list[SyllableNote]:
    data = _load(document, "notes")
    return [
        note_from_payload(obj, f"notes[{i}]", require_lyric=False)
        for i, obj in enumerate(_array(data, "notes", "notes"))
    ]


def write_deviation(curve: DeviationCurve) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "deviation": deviation_to_payload(curve),
    }
    return canonical_json(payload)


def parse_deviation(document: str) -> DeviationCurve:
    data = _load(document, "deviation")
    return deviation_from_payload(
        _array(data, "deviation", "deviation"), "deviation"
    )


# ---------------------------------------------------------------------------
# Transcript
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TranscriptLine:
    text: str
    start_s: float
    end_s: float


def write_transcript(lines: list[TranscriptLine]) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "lines": [
            {
                "text": line.text,
                "start_s": format_seconds(line.start_s),
                "end_s": format_seconds(line.end_s),
            }
            for line in lines
        ],
    }
    return canonical_json(payload)


def parse_transcript(document: str) -> list[TranscriptLine]:
    data = _load(document, "transcript")
    lines = []
    prev_start = None
    for i, obj in enumerate(_array(data, "lines", "transcript")):
        path = f"transcript.lines[{i}]"
        if not isinstance(obj, dict):
            raise SchemaError(path, "expected object")
        start = _seconds(obj, "start_s", path)
        end = _seconds(obj, "end_s", path)
        if end <= start:
            raise SchemaError(f"{path}.end_s", "end must exceed start")
        if prev_start is not None and start < prev_start:
            raise SchemaError(f"{path}.start_s", "line start times must be monotone")
        prev_start = start
        lines.append(TranscriptLine(_string(obj, "text", path), start, end))
    return lines


# ---------------------------------------------------------------------------
# Translation candidates
# ---------------------------------------------------------------------------

def write_candidates(target_syllables: int, candidates: list[TranslationCandidate]) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "target_syllables": target_syllables,
        "candidates": [
            {"text": c.text, "score": c.beam_score} for c in candidates
        ],
    }
    return canonical_json(payload)


def parse_candidates(document: str) -> tuple[int, list[TranslationCandidate]]:
    data = _load(document, "candidates")
    target = _integer(data, "target_syllables", "candidates")
    if target < 1:
        raise SchemaError("candidates.target_syllables", "must be >= 1")
    out = []
    for i, obj in enumerate(_array(data, "candidates", "candidates")):
        path = f"candidates.candidates[{i}]"
        if not isinstance(obj, dict):
            raise SchemaError(path, "expected object")
        text = _string(obj, "text", path)
        score = _field(obj, "score", path)
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise SchemaError(f"{path}.score", f"expected number, got {score!r}")
        if not math.isfinite(score):
            raise SchemaError(f"{path}.score", "score must be finite")
        flags = obj.get("flags", [])
        if not isinstance(flags, list) or not all(isinstance(f, str) for f in flags):
            raise SchemaError(f"{path}.flags", "expected array of strings")
        out.append(TranslationCandidate(text=text, beam_score=float(score)))
    if not out:
        raise SchemaError("candidates.candidates", "must not be empty")
    return target, out


# ---------------------------------------------------------------------------
# Labels / contour validation (thin wrappers so adapters can be checked
# against every format from one module)
# ---------------------------------------------------------------------------

def validate_labels(text: str):
    return parse_timed_labels(text)


def validate_contour(text: str):
    return parse_contour(text)


def validate_transcript(document: str):
    return parse_transcript(document)


def validate_candidates(document: str):
    return parse_candidates(document)


# ---------------------------------------------------------------------------
# UST export
# ---------------------------------------------------------------------------

def duration_to_ticks(duration_s: float, tempo_bpm: float, tick_resolution: int) -> int:
    return round(duration_s * tempo_bpm / 60.0 * tick_resolution)


def export_ust(
    project: SynthProject,
    tempo_bpm: float,
    tick_resolution: int = UST_TICKS_PER_QUARTER,
) -> str:
    """Render a project as UST text for open singing-voice editors.

    Notes become sequential UST note blocks at NoteNum 60 with lengths
    quantized to ticks; gaps become rests (Lyric R).  The deviation curve is
    written per note as classic Mode1 pitch points: one value every 5 ms,
    in cents.  Notes shorter than one tick are clamped to one tick with an
    :class:`ExportWarning`.
    """
    if tempo_bpm <= 0:
        raise Sv2SvtError(f"tempo_bpm must be positive, got {tempo_bpm}")
    if tick_resolution <= 0:
        raise Sv2SvtError(f"tick_resolution must be positive, got {tick_resolution}")
    validate_project(project)

    blocks: list[tuple[int, str | None, float, float]] = []  # ticks, lyric, t0, t1
    cursor = 0.0
    for note in project.notes:
        gap = q6(note.onset_s - cursor)
        if gap > 0:
            rest_ticks = duration_to_ticks(gap, tempo_bpm, tick_resolution)
            if rest_ticks > 0:
                blocks.append((rest_ticks, None, cursor, note.onset_s))
        ticks = duration_to_ticks(note.duration_s, tempo_bpm, tick_resolution)
        if ticks < 1:
            warnings.warn(
                f"note at {note.onset_s:.6f}s shorter than one tick; clamped",
                ExportWarning,
                stacklevel=2,
            )
            ticks = 1
        blocks.append((ticks, note.lyric, note.onset_s, note.end_s))
        cursor = note.end_s

    lines = [
        "[#VERSION]",
        "UST Version1.2",
        "[#SETTING]",
        f"Tempo={tempo_bpm:.2f}",
        "Tracks=1",
        "ProjectName=sv2svt",
    ]
    has_pitch = bool(project.deviation.points)
    for index, (ticks, lyric, t0, t1) in enumerate(blocks):
        lines.append(f"[#{index:04d}]")
        lines.append(f"Length={ticks}")
        lines.append(f"Lyric={'R' if lyric is None else lyric}")
        lines.append(f"NoteNum={project.base_pitch}")
        lines.append("PreUtterance=")
        if lyric is not None and has_pitch:
            cents = []
            steps = int((t1 - t0) / UST_PITCH_INTERVAL_S)
            for k in range(steps + 1):
                t = q6(t0 + k * UST_PITCH_INTERVAL_S)
                cents.append(str(round(project.deviation.value_at(t) * 100)))
            lines.append("PBType=5")
            lines.append("Pitches=" + ",".join(cents))
    lines.append("[#TRACKEND]")
    return "\n".join(lines) + "\n"
