"""Pipeline orchestration: stage adapters, caching, and the full dataflow.

The alignment branch (transcribe -> align -> notes) and the melody branch
(vme -> deviation) are independent and may run in either order or
concurrently; per-line translation chains are likewise independent.  Every
intermediate lands in the work directory and is content-hashed so unchanged
stages replay from cache.
"""

from __future__ import annotations

import hashlib
import json
import shlex
import shutil
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .contour import contour_to_deviation, parse_contour
from .errors import AdapterError, ConfigError, Sv2SvtError
from .fitting import FitResult, assign_lyrics, select_candidate
from .interchange import (
    ProjectMetadata,
    SynthProject,
    TranscriptLine,
    canonical_json,
    note_from_payload,
    note_to_payload,
    parse_candidates,
    parse_deviation,
    parse_notes,
    parse_project,
    parse_transcript,
    validate_candidates,
    validate_contour,
    validate_labels,
    validate_transcript,
    write_deviation,
    write_notes,
    write_project,
)
from .moras import (
    ReadingDictionary,
    ReadingResolver,
    SubprocessSegmenter,
    is_kanji,
    parse_reading_dictionary,
)
from .timing import SyllableNote, notes_from_alignment, parse_timed_labels

WORKDIR_ENV = "SV2SVT_WORKDIR"
STAGES = ("transcribe", "align", "vme", "translate", "segment", "readings")

# Placeholders each adapter command must carry ({audio} is optional where
# listed; segment speaks the line-in/line-out protocol and takes none).
REQUIRED_PLACEHOLDERS = {
    "transcribe": ("{input}", "{output}"),
    "align": ("{input}", "{output}"),
    "vme": ("{input}", "{output}"),
    "translate": ("{input}", "{output}", "{target_syllables}"),
    "readings": ("{input}", "{output}"),
    "segment": (),
}
OPTIONAL_PLACEHOLDERS = {"align": ("{audio}",)}


@dataclass(frozen=True)
class StageAdapter:
    stage: str
    command: tuple[str, ...]
    timeout_s: float = 120.0

    def template(self) -> str:
        return " ".join(self.command)


@dataclass
class PipelineConfig:
    adapters: dict[str, StageAdapter]
    work_dir: Path
    source_language: str = "en"
    target_language: str = "ja"
    tempo_bpm: float = 120.0
    oov: str = "error"
    allow_overflow: bool = False
    smoothing_window: int = 0
    tick_resolution: int = 480
    branch_order: str = "parallel"
    line_workers: int = 4


_BOOL = {"true": True, "false": False, "yes": True, "no": False}


def parse_config(text: str, base_dir: Path) -> PipelineConfig:
    """Parse the key-value pipeline config format.

    Lines are ``key = value``; ``#`` starts a comment.  Adapter commands are
    ``adapter.<stage>.command`` with shell-style quoting, plus optional
    ``adapter.<stage>.timeout_s``.  Relative paths resolve against the
    config file's directory.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"config line {lineno}: empty key or value")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = value

    adapters: dict[str, StageAdapter] = {}
    for stage in STAGES:
        command_key = f"adapter.{stage}.command"
        if command_key not in values:
            continue
        try:
            command = tuple(shlex.split(values.pop(command_key)))
        except ValueError as exc:
            raise ConfigError(f"{command_key}: {exc}") from None
        if not command:
            raise ConfigError(f"{command_key}: empty command")
        timeout = 120.0
        timeout_key = f"adapter.{stage}.timeout_s"
        if timeout_key in values:
            try:
                timeout = float(values.pop(timeout_key))
            except ValueError:
                raise ConfigError(f"{timeout_key}: not a number") from None
            if timeout <= 0:
                raise ConfigError(f"{timeout_key}: must be positive")
        adapters[stage] = StageAdapter(stage, command, timeout)

    config = PipelineConfig(adapters=adapters, work_dir=base_dir / "work")

    def pop_float(key: str, default: float) -> float:
        if key not in values:
            return default
        try:
            return float(values.pop(key))
        except ValueError:
            raise ConfigError(f"{key}: not a number") from None

    def pop_int(key: str, default: int) -> int:
        if key not in values:
            return default
        try:
            return int(values.pop(key))
        except ValueError:
            raise ConfigError(f"{key}: not an integer") from None

    if "work_dir" in values:
        config.work_dir = (base_dir / values.pop("work_dir")).resolve()
    config.tempo_bpm = pop_float("tempo_bpm", config.tempo_bpm)
    config.tick_resolution = pop_int("tick_resolution", config.tick_resolution)
    config.smoothing_window = pop_int("smoothing_window", config.smoothing_window)
    config.line_workers = pop_int("line_workers", config.line_workers)
    if "oov" in values:
        config.oov = values.pop("oov")
    if "allow_overflow" in values:
        raw = values.pop("allow_overflow").lower()
        if raw not in _BOOL:
            raise ConfigError(f"allow_overflow: expected true/false, got {raw!r}")
        config.allow_overflow = _BOOL[raw]
    if "branch_order" in values:
        config.branch_order = values.pop("branch_order")
    if "source_language" in values:
        config.source_language = values.pop("source_language")
    if "target_language" in values:
        config.target_language = values.pop("target_language")
    if values:
        raise ConfigError("unknown config keys: " + ", ".join(sorted(values)))
    return config


def load_config(path: Path, env: dict | None = None) -> PipelineConfig:
    import os

    env = env if env is not None else dict(os.environ)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    config = parse_config(text, path.resolve().parent)
    override = env.get(WORKDIR_ENV)
    if override:
        config.work_dir = Path(override).resolve()
    return config


def validate_config(config: PipelineConfig, stages=STAGES) -> None:
    """Check adapter presence, placeholders, and executable resolvability."""
    if config.source_language != "en" or config.target_language != "ja":
        raise ConfigError(
            "this kernel translates en -> ja; got "
            f"{config.source_language!r} -> {config.target_language!r}"
        )
    if config.oov not in ("error", "skip"):
        raise ConfigError(f"oov: expected 'error' or 'skip', got {config.oov!r}")
    if config.branch_order not in ("parallel", "align-first", "vme-first"):
        raise ConfigError(f"branch_order: unknown value {config.branch_order!r}")
    if config.smoothing_window and config.smoothing_window % 2 == 0:
        raise ConfigError("smoothing_window must be odd (or 0 to disable)")
    if config.tempo_bpm <= 0:
        raise ConfigError("tempo_bpm must be positive")
    if config.tick_resolution <= 0:
        raise ConfigError("tick_resolution must be positive")
    for stage in stages:
        adapter = config.adapters.get(stage)
        if adapter is None:
            raise ConfigError(f"no adapter configured for stage {stage!r}")
        template = adapter.template()
        for placeholder in REQUIRED_PLACEHOLDERS[stage]:
            if placeholder not in template:
                raise ConfigError(
                    f"adapter.{stage}.command: missing placeholder {placeholder}"
                )
        executable = adapter.command[0]
        if "{" in executable:
            raise ConfigError(
                f"adapter.{stage}.command: executable may not be a placeholder"
            )
        if "/" in executable:
            if not Path(executable).exists():
                raise ConfigError(
                    f"adapter.{stage}.command: executable not found: {executable}"
                )
        elif shutil.which(executable) is None:
            raise ConfigError(
                f"adapter.{stage}.command: executable not on PATH: {executable}"
            )


# ---------------------------------------------------------------------------
# Content-addressed stage cache
# ---------------------------------------------------------------------------

def file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class StageCache:
    """Index of stage outputs keyed by input hashes and stage parameters.

    The index file is the single synchronized resource of a pipeline run;
    all access goes through one in-process lock.
    """

    def __init__(self, work_dir: Path):
        self.path = work_dir / "cache-index.json"
        self._lock = threading.Lock()
        self._index: dict[str, dict] = {}
        if self.path.exists():
            try:
                self._index = json.loads(self.path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                self._index = {}

    @staticmethod
    def key(stage: str, template: str, input_hashes: list[str], params: dict) -> str:
        payload = json.dumps(
            {
                "stage": stage,
                "template": template,
                "inputs": input_hashes,
                "params": params,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def lookup(self, key: str) -> Path | None:
        with self._lock:
            record = self._index.get(key)
        if record is None:
            return None
        output = Path(record["output"])
        if not output.exists() or file_sha256(output) != record["sha256"]:
            return None
        return output

    def store(self, key: str, output: Path) -> None:
        record = {"output": str(output), "sha256": file_sha256(output)}
        with self._lock:
            self._index[key] = record
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text(
                json.dumps(self._index, sort_keys=True, indent=2) + "\n",
                encoding="utf-8",
            )
            tmp.replace(self.path)


# ---------------------------------------------------------------------------
# Stage execution
# ---------------------------------------------------------------------------

@dataclass
class StageReport:
    stage: str
    status: str  # "run" or "cached"
    output: str


@dataclass
class LineReport:
    line_index: int
    text: str
    target_syllables: int
    chosen_text: str = ""
    mora_count: int = 0
    deficit: int = 0
    fallback_used: bool = False
    skipped: str | None = None


@dataclass
class PipelineReport:
    stages: list[StageReport] = field(default_factory=list)
    lines: list[LineReport] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "stages": [vars(s) for s in self.stages],
            "lines": [vars(l) for l in self.lines],
        }


class _StageRunner:
    def __init__(self, config: PipelineConfig, cache: StageCache):
        self.config = config
        self.cache = cache
        self._reports: dict[str, StageReport] = {}
        self._lock = threading.Lock()

    def _record(self, name: str, status: str, output: Path) -> None:
        with self._lock:
            self._reports[name] = StageReport(name, status, str(output))

    def reports_in_order(self, order: list[str]) -> list[StageReport]:
        return [self._reports[name] for name in order if name in self._reports]

    def run_adapter(
        self,
        name: str,
        stage: str,
        inputs: dict[str, Path],
        output: Path,
        validator,
        params: dict | None = None,
    ) -> Path:
        """Run one adapter stage with caching and output validation.

        ``inputs`` maps placeholder names (without braces) to files; every
        input participates in the cache key.
        """
        adapter = self.config.adapters[stage]
        hashes = [f"{k}:{file_sha256(p)}" for k, p in sorted(inputs.items())]
        key = StageCache.key(stage, adapter.template(), hashes, params or {})
        cached = self.cache.lookup(key)
        if cached is not None and cached == output:
            self._record(name, "cached", output)
            return output

        substitutions = {f"{{{k}}}": str(p) for k, p in inputs.items()}
        substitutions["{output}"] = str(output)
        for k, v in (params or {}).items():
            substitutions[f"{{{k}}}"] = str(v)
        args = []
        for token in adapter.command:
            for placeholder, value in substitutions.items():
                token = token.replace(placeholder, value)
            args.append(token)
        try:
            proc = subprocess.run(
                args,
                capture_output=True,
                text=True,
                timeout=adapter.timeout_s,
                cwd=self.config.work_dir,
            )
        except subprocess.TimeoutExpired:
            raise AdapterError(stage, f"timed out after {adapter.timeout_s}s")
        except OSError as exc:
            raise AdapterError(stage, f"failed to start: {exc}")
        if proc.returncode != 0:
            raise AdapterError(
                stage, f"exited with code {proc.returncode}", stderr=proc.stderr
            )
        if not output.exists():
            raise AdapterError(
                stage, f"did not produce output file {output}", stderr=proc.stderr
            )
        try:
            validator(output.read_text(encoding="utf-8"))
        except Sv2SvtError as exc:
            raise AdapterError(stage, f"invalid output: {exc}", stderr=proc.stderr)
        self.cache.store(key, output)
        self._record(name, "run", output)
        return output

    def run_core(
        self,
        name: str,
        inputs: list[Path],
        params: dict,
        output: Path,
        builder,
    ) -> Path:
        """Run a deterministic in-process stage with the same cache semantics.

        ``builder`` returns the output file's text.
        """
        hashes = [file_sha256(p) for p in inputs]
        key = StageCache.key(
            f"core:{name}", f"internal:{__version__}", hashes, params
        )
        cached = self.cache.lookup(key)
        if cached is not None and cached == output:
            self._record(name, "cached", output)
            return output
        text = builder()
        output.write_text(text, encoding="utf-8")
        self.cache.store(key, output)
        self._record(name, "run", output)
        return output


# ---------------------------------------------------------------------------
# The dataflow
# ---------------------------------------------------------------------------

_STAGE_VALIDATORS = {
    "transcribe": validate_transcript,
    "align": validate_labels,
    "vme": validate_contour,
    "translate": validate_candidates,
    "readings": parse_reading_dictionary,
}

_STAGE_OUTPUT_NAMES = {
    "transcribe": "transcript.json",
    "align": "labels.tsv",
    "vme": "contour.csv",
    "translate": "candidates.json",
    "readings": "readings.tsv",
}


def run_stage(
    config: PipelineConfig,
    stage: str,
    inputs: dict[str, Path],
    params: dict | None = None,
) -> tuple[Path, StageReport]:
    """Run a single adapter stage with the same caching semantics as a full
    pipeline run.  ``inputs`` maps placeholder names to files."""
    if stage not in _STAGE_VALIDATORS:
        raise ConfigError(f"unknown stage {stage!r}")
    validate_config(config, stages=(stage,))
    work = config.work_dir.resolve()
    work.mkdir(parents=True, exist_ok=True)
    runner = _StageRunner(config, StageCache(work))
    resolved = {k: Path(p).resolve() for k, p in inputs.items()}
    for k, p in resolved.items():
        if not p.exists():
            raise ConfigError(f"stage input {k} not found: {p}")
    output = runner.run_adapter(
        stage,
        stage,
        resolved,
        work / _STAGE_OUTPUT_NAMES[stage],
        _STAGE_VALIDATORS[stage],
        params=params,
    )
    return output, runner.reports_in_order([stage])[0]


def _line_word_ranges(lines: list[TranscriptLine]) -> list[range]:
    """Global word-index range of each transcript line."""
    ranges = []
    offset = 0
    for line in lines:
        n = len(line.text.split())
        ranges.append(range(offset, offset + n))
        offset += n
    return ranges


def _fit_payload(line_index: int, fit: FitResult, notes: list[SyllableNote]) -> str:
    return canonical_json(
        {
            "schema_version": "1",
            "line_index": line_index,
            "fit": {
                "chosen_text": fit.chosen.text,
                "beam_score": fit.chosen.beam_score,
                "target_syllables": fit.target_syllables,
                "mora_count": fit.mora_count,
                "deficit": fit.deficit,
                "fallback_used": fit.fallback_used,
            },
            "notes": [note_to_payload(n) for n in notes],
        }
    )


def _parse_fit(text: str) -> tuple[dict, list[SyllableNote]]:
    data = json.loads(text)
    notes = [
        note_from_payload(obj, f"fit.notes[{i}]", require_lyric=True)
        for i, obj in enumerate(data["notes"])
    ]
    return data["fit"], notes


def run_pipeline(
    config: PipelineConfig,
    audio_path: Path,
) -> tuple[SynthProject, PipelineReport]:
    """Execute the full dataflow and return the project plus a stage report.

    The audio file is handed to adapters untouched; the core never decodes
    audio.  Reruns with unchanged inputs replay every stage from cache and
    produce byte-identical output.
    """
    validate_config(config)
    audio_path = Path(audio_path).resolve()
    if not audio_path.exists():
        raise ConfigError(f"audio file not found: {audio_path}")
    work = config.work_dir.resolve()
    work.mkdir(parents=True, exist_ok=True)
    cache = StageCache(work)
    runner = _StageRunner(config, cache)

    def align_branch() -> tuple[list[TranscriptLine], list[list[SyllableNote]]]:
        transcript_path = runner.run_adapter(
            "transcribe",
            "transcribe",
            {"input": audio_path},
            work / "transcript.json",
            validate_transcript,
        )
        labels_path = runner.run_adapter(
            "align",
            "align",
            {"input": transcript_path, "audio": audio_path},
            work / "labels.tsv",
            validate_labels,
        )
        lines = parse_transcript(transcript_path.read_text(encoding="utf-8"))

        def build_notes_text() -> str:
            return write_notes(
                [n for per_line in _notes_per_line(lines, labels_path) for n in per_line]
            )

        notes_path = runner.run_core(
            "notes", [transcript_path, labels_path], {}, work / "notes.json",
            build_notes_text,
        )
        all_notes = parse_notes(notes_path.read_text(encoding="utf-8"))
        per_line = _split_notes_by_line(lines, all_notes)
        return lines, per_line

    def _notes_per_line(lines, labels_path) -> list[list[SyllableNote]]:
        timed, _gaps = parse_timed_labels(labels_path.read_text(encoding="utf-8"))
        ranges = _line_word_ranges(lines)
        per_line = []
        for line, word_range in zip(lines, ranges):
            line_timed = [tp for tp in timed if tp.word_index in word_range]
            seen = {tp.word_index for tp in line_timed}
            missing = [i for i in word_range if i not in seen]
            if missing:
                raise Sv2SvtError(
                    f"line {line.text!r}: no aligned phonemes for word index(es) "
                    + ", ".join(map(str, missing))
                )
            per_line.append(notes_from_alignment(line_timed))
        orphans = {tp.word_index for tp in timed} - {
            i for r in ranges for i in r
        }
        if orphans:
            raise Sv2SvtError(
                "labels reference word indexes outside the transcript: "
                + ", ".join(map(str, sorted(orphans)))
            )
        return per_line

    def _split_notes_by_line(lines, all_notes) -> list[list[SyllableNote]]:
        ranges = _line_word_ranges(lines)
        return [
            [n for n in all_notes if n.word_index in word_range]
            for word_range in ranges
        ]

    def melody_branch():
        contour_path = runner.run_adapter(
            "vme",
            "vme",
            {"input": audio_path},
            work / "contour.csv",
            validate_contour,
        )
        frames = parse_contour(contour_path.read_text(encoding="utf-8"))

        def build_deviation_text() -> str:
            return write_deviation(
                contour_to_deviation(frames, config.smoothing_window)
            )

        deviation_path = runner.run_core(
            "deviation",
            [contour_path],
            {"smoothing_window": config.smoothing_window},
            work / "deviation.json",
            build_deviation_text,
        )
        return parse_deviation(deviation_path.read_text(encoding="utf-8"))

    if config.branch_order == "align-first":
        lines, notes_per_line = align_branch()
        deviation = melody_branch()
    elif config.branch_order == "vme-first":
        deviation = melody_branch()
        lines, notes_per_line = align_branch()
    else:
        with ThreadPoolExecutor(max_workers=2) as pool:
            align_future = pool.submit(align_branch)
            melody_future = pool.submit(melody_branch)
            lines, notes_per_line = align_future.result()
            deviation = melody_future.result()

    line_reports: list[LineReport] = []
    fitted: dict[int, list[SyllableNote]] = {}
    chosen_texts: dict[int, str] = {}

    def process_line(i: int) -> LineReport:
        line = lines[i]
        notes = notes_per_line[i]
        report = LineReport(i, line.text, target_syllables=len(notes))
        if not notes:
            report.skipped = "no aligned notes"
            fitted[i] = []
            return report
        line_path = work / f"line-{i:03d}.txt"
        line_path.write_text(line.text + "\n", encoding="utf-8")
        candidates_path = runner.run_adapter(
            f"translate[{i}]",
            "translate",
            {"input": line_path},
            work / f"candidates-{i:03d}.json",
            validate_candidates,
            params={"target_syllables": len(notes)},
        )
        target, candidates = parse_candidates(
            candidates_path.read_text(encoding="utf-8")
        )
        if target != len(notes):
            raise AdapterError(
                "translate",
                f"line {i}: adapter echoed target_syllables={target}, "
                f"expected {len(notes)}",
            )

        segmenter = SubprocessSegmenter(
            list(config.adapters["segment"].command),
            timeout_s=config.adapters["segment"].timeout_s,
        )
        kanji_words = sorted(
            {
                word
                for cand in candidates
                for word in segmenter.segment(cand.text)
                if any(is_kanji(ch) for ch in word)
            }
        )
        dictionary = ReadingDictionary.empty()
        if kanji_words:
            words_path = work / f"words-{i:03d}.txt"
            words_path.write_text("\n".join(kanji_words) + "\n", encoding="utf-8")
            readings_path = runner.run_adapter(
                f"readings[{i}]",
                "readings",
                {"input": words_path},
                work / f"readings-{i:03d}.tsv",
                parse_reading_dictionary,
            )
            dictionary = parse_reading_dictionary(
                readings_path.read_text(encoding="utf-8")
            )

        resolver = ReadingResolver(segmenter, dictionary)

        def build_fit_text() -> str:
            fit = select_candidate(candidates, len(notes), resolver)
            assigned = assign_lyrics(notes, fit.chosen.reading, config.allow_overflow)
            return _fit_payload(i, fit, assigned)

        fit_inputs = [candidates_path, work / "notes.json"]
        if kanji_words:
            fit_inputs.append(work / f"readings-{i:03d}.tsv")
        fit_path = runner.run_core(
            f"fit[{i}]",
            fit_inputs,
            {"allow_overflow": config.allow_overflow, "line": i},
            work / f"fit-{i:03d}.json",
            build_fit_text,
        )
        fit_data, assigned = _parse_fit(fit_path.read_text(encoding="utf-8"))
        fitted[i] = assigned
        chosen_texts[i] = fit_data["chosen_text"]
        report.chosen_text = fit_data["chosen_text"]
        report.mora_count = fit_data["mora_count"]
        report.deficit = fit_data["deficit"]
        report.fallback_used = fit_data["fallback_used"]
        return report

    if config.line_workers > 1 and len(lines) > 1:
        with ThreadPoolExecutor(max_workers=config.line_workers) as pool:
            line_reports = list(pool.map(process_line, range(len(lines))))
    else:
        line_reports = [process_line(i) for i in range(len(lines))]

    all_notes = [n for i in range(len(lines)) for n in fitted[i]]
    if not all_notes:
        raise Sv2SvtError("pipeline produced no notes; nothing to export")
    metadata = ProjectMetadata(
        source_text="\n".join(line.text for line in lines),
        target_text="\n".join(
            chosen_texts.get(i, "") for i in range(len(lines))
        ),
        tool_version=__version__,
    )
    project = SynthProject(
        notes=tuple(all_notes), deviation=deviation, metadata=metadata
    )

    project_path = runner.run_core(
        "project",
        [work / "notes.json", work / "deviation.json"]
        + [work / f"fit-{i:03d}.json" for i in range(len(lines)) if i in chosen_texts],
        {"tool_version": __version__},
        work / "project.json",
        lambda: write_project(project),
    )
    final_project = parse_project(project_path.read_text(encoding="utf-8"))

    order = ["transcribe", "align", "vme", "notes", "deviation"]
    for i in range(len(lines)):
        order += [f"translate[{i}]", f"readings[{i}]", f"fit[{i}]"]
    order.append("project")
    report = PipelineReport(
        stages=runner.reports_in_order(order), lines=line_reports
    )
    return final_project, report
