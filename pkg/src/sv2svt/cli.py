"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 adapter error, 4 core
validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .contour import contour_to_deviation, parse_contour
from .errors import AdapterError, ConfigError, Sv2SvtError
from .fitting import assign_lyrics, select_candidate
from .interchange import (
    export_ust,
    parse_candidates,
    parse_notes,
    parse_project,
    write_deviation,
    write_notes,
)
from .moras import (
    KanjiRunSegmenter,
    ReadingDictionary,
    ReadingResolver,
    SubprocessSegmenter,
    parse_reading_dictionary,
)
from .phonology import (
    count_syllables,
    line_words,
    parse_pronunciation_dictionary,
    syllabify_words,
)
from .pipeline import load_config, run_pipeline, validate_config
from .resources import bundled_dictionary
from .timing import notes_from_alignment, parse_timed_labels

EXIT_CONFIG = 2
EXIT_ADAPTER = 3
EXIT_CORE = 4


def _load_dictionary(path: str | None):
    if path is None:
        return bundled_dictionary()
    return parse_pronunciation_dictionary(Path(path).read_text(encoding="utf-8"))


def cmd_run(args) -> int:
    config = load_config(Path(args.config))
    project, report = run_pipeline(config, Path(args.audio))
    project_path = config.work_dir / "project.json"
    if args.output:
        Path(args.output).write_text(
            project_path.read_text(encoding="utf-8"), encoding="utf-8"
        )
    if args.ust:
        text = export_ust(project, config.tempo_bpm, config.tick_resolution)
        Path(args.ust).write_text(text, encoding=args.ust_encoding, newline="\n")
    for stage in report.stages:
        print(f"{stage.status:<7} {stage.stage:<14} {stage.output}")
    for line in report.lines:
        if line.skipped:
            print(f"line {line.line_index}: skipped ({line.skipped})")
        else:
            tag = " [fallback]" if line.fallback_used else ""
            print(
                f"line {line.line_index}: {line.target_syllables} syllables -> "
                f"{line.chosen_text!r} ({line.mora_count} moras, "
                f"deficit {line.deficit}){tag}"
            )
    print(f"project: {project_path}")
    return 0


def cmd_validate_config(args) -> int:
    config = load_config(Path(args.config))
    validate_config(config)
    print("config ok")
    return 0


def cmd_syllabify(args) -> int:
    dictionary = _load_dictionary(args.dict)
    line = " ".join(args.words)
    words = line_words(line)
    known = [w for w in words if w in dictionary]
    if known:
        syllabified = syllabify_words(
            [list(dictionary.primary(w).phonemes) for w in known]
        )
        by_word = {i: ws for i, ws in enumerate(syllabified)}
        for i, word in enumerate(known):
            rendered = " ".join(s.compact() for s in by_word[i].syllables)
            print(f"{word}: {rendered if rendered else '(merged into neighbor)'}")
    total = count_syllables(line, dictionary, oov=args.oov)
    print(f"syllables: {total}")
    return 0


def cmd_notes(args) -> int:
    timed, _ = parse_timed_labels(Path(args.labels).read_text(encoding="utf-8"))
    notes = notes_from_alignment(timed)
    document = write_notes(notes)
    if args.output:
        Path(args.output).write_text(document, encoding="utf-8")
    else:
        sys.stdout.write(document)
    return 0


def cmd_contour(args) -> int:
    frames = parse_contour(Path(args.contour).read_text(encoding="utf-8"))
    curve = contour_to_deviation(frames, smoothing_window=args.smooth)
    document = write_deviation(curve)
    if args.output:
        Path(args.output).write_text(document, encoding="utf-8")
    else:
        sys.stdout.write(document)
    return 0


def cmd_fit_lyrics(args) -> int:
    target, candidates = parse_candidates(
        Path(args.candidates).read_text(encoding="utf-8")
    )
    if args.segmenter:
        import shlex

        segmenter = SubprocessSegmenter(shlex.split(args.segmenter))
    else:
        segmenter = KanjiRunSegmenter()
    dictionary = ReadingDictionary.empty()
    if args.readings:
        dictionary = parse_reading_dictionary(
            Path(args.readings).read_text(encoding="utf-8")
        )
    resolver = ReadingResolver(segmenter, dictionary)
    fit = select_candidate(candidates, target, resolver)
    result = {
        "chosen_text": fit.chosen.text,
        "beam_score": fit.chosen.beam_score,
        "target_syllables": fit.target_syllables,
        "mora_count": fit.mora_count,
        "deficit": fit.deficit,
        "fallback_used": fit.fallback_used,
    }
    if args.notes:
        notes = parse_notes(Path(args.notes).read_text(encoding="utf-8"))
        assigned = assign_lyrics(notes, fit.chosen.reading, args.allow_overflow)
        result["lyrics"] = [n.lyric for n in assigned]
    print(json.dumps(result, ensure_ascii=False, sort_keys=True, indent=2))
    return 0


def cmd_export(args) -> int:
    project = parse_project(Path(args.project).read_text(encoding="utf-8"))
    text = export_ust(project, args.tempo, args.ticks)
    Path(args.ust).write_text(text, encoding=args.encoding, newline="\n")
    print(f"wrote {args.ust}")
    return 0


def cmd_eval_stats(args) -> int:
    from .stats import analyze, parse_score_table, report_json, report_text

    table = parse_score_table(Path(args.scores).read_text(encoding="utf-8"))
    analysis = analyze(table, confidence=args.confidence)
    sys.stdout.write(report_text(analysis))
    if args.json:
        Path(args.json).write_text(report_json(analysis), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sv2svt",
        description="Singing-voice translation pipeline kernel (en -> ja).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the full pipeline on an audio file")
    p.add_argument("--config", required=True)
    p.add_argument("--audio", required=True)
    p.add_argument("--output", help="copy the final project JSON here")
    p.add_argument("--ust", help="also export UST to this path")
    p.add_argument("--ust-encoding", default="utf-8", choices=["utf-8", "shift_jis"])
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate-config", help="check a pipeline config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate_config)

    p = sub.add_parser("syllabify", help="syllabify words via the dictionary")
    p.add_argument("words", nargs="+")
    p.add_argument("--dict", help="CMUdict-format file (default: bundled sample)")
    p.add_argument("--oov", default="error", choices=["error", "skip"])
    p.set_defaults(func=cmd_syllabify)

    p = sub.add_parser("notes", help="timed labels TSV -> notes JSON")
    p.add_argument("--labels", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_notes)

    p = sub.add_parser("contour", help="contour CSV -> deviation JSON")
    p.add_argument("--contour", required=True)
    p.add_argument("--output")
    p.add_argument("--smooth", type=int, default=0,
                   help="odd moving-median window over voiced points (0 = off)")
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("fit-lyrics", help="select a candidate and assign lyrics")
    p.add_argument("--candidates", required=True)
    p.add_argument("--readings", help="reading dictionary TSV")
    p.add_argument("--segmenter", help="segmenter command (default: kanji-run rule)")
    p.add_argument("--notes", help="notes JSON to assign lyrics onto")
    p.add_argument("--allow-overflow", action="store_true")
    p.set_defaults(func=cmd_fit_lyrics)

    p = sub.add_parser("export", help="project JSON -> UST")
    p.add_argument("--project", required=True)
    p.add_argument("--ust", required=True)
    p.add_argument("--tempo", type=float, default=120.0)
    p.add_argument("--ticks", type=int, default=480)
    p.add_argument("--encoding", default="utf-8", choices=["utf-8", "shift_jis"])
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("eval-stats", help="analyze a MOS score CSV")
    p.add_argument("--scores", required=True)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--json", help="also write the machine-readable report here")
    p.set_defaults(func=cmd_eval_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdapterError as exc:
        print(f"adapter error: {exc}", file=sys.stderr)
        return EXIT_ADAPTER
    except Sv2SvtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORE


if __name__ == "__main__":
    sys.exit(main())
