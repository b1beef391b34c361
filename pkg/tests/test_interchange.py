import json
import random

import pytest

from sv2svt.contour import DeviationCurve
from sv2svt.fitting import TranslationCandidate
from sv2svt.interchange import (
    ExportWarning,
    ProjectMetadata,
    ProjectValidationError,
    SchemaError,
    SynthProject,
    TranscriptLine,
    duration_to_ticks,
    export_ust,
    parse_candidates,
    parse_notes,
    parse_project,
    parse_transcript,
    write_candidates,
    write_notes,
    write_project,
    write_transcript,
)
from sv2svt.phonology import Syllable, parse_phonemes
from sv2svt.timing import SyllableNote, q6

VOWEL_CHOICES = ["AA1", "IY0", "UW1", "EH2", "AE1", "OW0"]
CONSONANT_CHOICES = ["K", "B", "R", "S", "T", "SH", "M", "N"]
LYRIC_CHOICES = ["は", "な", "きょ", "っ", "ー", "ん", "+", "ファ"]


def random_syllable(rng: random.Random) -> Syllable:
    onset = [rng.choice(CONSONANT_CHOICES) for _ in range(rng.randint(0, 2))]
    coda = [rng.choice(CONSONANT_CHOICES) for _ in range(rng.randint(0, 2))]
    return Syllable.from_phonemes(
        parse_phonemes(onset + [rng.choice(VOWEL_CHOICES)] + coda)
    )


def random_project(rng: random.Random) -> SynthProject:
    notes = []
    clock = 0.0
    word_index = 0
    for i in range(rng.randint(1, 8)):
        clock = q6(clock + rng.randint(0, 40) / 100)
        duration = q6(rng.randint(5, 80) / 100)
        notes.append(
            SyllableNote(
                onset_s=clock,
                duration_s=duration,
                syllable=random_syllable(rng),
                word_index=word_index,
                lyric=rng.choice(LYRIC_CHOICES),
                merged_words=(word_index - 1,) if rng.random() < 0.1 and word_index else (),
            )
        )
        clock = q6(clock + duration)
        if rng.random() < 0.5:
            word_index += 1
    points = []
    t = 0.0
    for _ in range(rng.randint(0, 30)):
        t = q6(t + rng.randint(1, 20) / 100)
        points.append((t, round(rng.uniform(-12, 12), 6)))
    return SynthProject(
        notes=tuple(notes),
        deviation=DeviationCurve(tuple(points)),
        metadata=ProjectMetadata(
            source_text=rng.choice(["blueberry", "extra cat", ""]),
            target_text=rng.choice(["花が咲くよ", "ねこ", ""]),
            tool_version="0.1.0",
        ),
    )


class TestProjectRoundTrip:
    def test_empty_notes_rejected_before_writing(self):
        project = SynthProject(notes=(), deviation=DeviationCurve(()))
        with pytest.raises(ProjectValidationError, match="no notes"):
            write_project(project)

    def test_minimal_project_is_byte_deterministic(self):
        rng = random.Random(0)
        project = random_project(rng)
        assert write_project(project) == write_project(project)

    def test_round_trip_identity(self):
        rng = random.Random(42)
        for _ in range(200):
            project = random_project(rng)
            again = parse_project(write_project(project))
            assert again == project

    def test_write_parse_write_is_stable(self):
        rng = random.Random(43)
        for _ in range(20):
            document = write_project(random_project(rng))
            assert write_project(parse_project(document)) == document

    def test_parse_accepts_numeric_seconds(self):
        document = write_project(random_project(random.Random(1)))
        data = json.loads(document)
        data["notes"][0]["onset_s"] = float(data["notes"][0]["onset_s"])
        relaxed = json.dumps(data, ensure_ascii=False)
        assert parse_project(relaxed) == parse_project(document)

    def test_base_pitch_enforced(self):
        project = random_project(random.Random(2))
        bad = SynthProject(
            notes=project.notes, deviation=project.deviation, base_pitch=61
        )
        with pytest.raises(ProjectValidationError, match="base_pitch"):
            write_project(bad)

    def test_unsorted_notes_rejected(self):
        rng = random.Random(3)
        project = random_project(rng)
        while len(project.notes) < 2:
            project = random_project(rng)
        flipped = SynthProject(
            notes=tuple(reversed(project.notes)),
            deviation=project.deviation,
            metadata=project.metadata,
        )
        with pytest.raises(ProjectValidationError, match="sorted"):
            write_project(flipped)

    def test_schema_error_names_field_path(self):
        document = write_project(random_project(random.Random(4)))
        data = json.loads(document)
        del data["notes"][0]["lyric"]
        with pytest.raises(SchemaError, match=r"project\.notes\[0\]\.lyric"):
            parse_project(json.dumps(data, ensure_ascii=False))

    def test_wrong_schema_version_rejected(self):
        document = write_project(random_project(random.Random(5)))
        data = json.loads(document)
        data["schema_version"] = "2"
        with pytest.raises(SchemaError, match="schema_version"):
            parse_project(json.dumps(data, ensure_ascii=False))

    def test_bad_syllable_rejected(self):
        document = write_project(random_project(random.Random(6)))
        data = json.loads(document)
        data["notes"][0]["syllable"] = "K B"  # no vowel
        with pytest.raises(SchemaError, match=r"notes\[0\]\.syllable"):
            parse_project(json.dumps(data, ensure_ascii=False))


class TestNotesDocument:
    def test_lyric_optional(self):
        syllable = Syllable.from_phonemes(parse_phonemes(["K", "AA1"]))
        note = SyllableNote(0.0, 0.5, syllable, 0)
        notes = parse_notes(write_notes([note]))
        assert notes[0].lyric is None
        assert notes == [note]


class TestTranscript:
    def test_round_trip(self):
        lines = [
            TranscriptLine("blueberry blueberry", 0.10, 2.70),
            TranscriptLine("extra cat", 3.00, 4.22),
        ]
        assert parse_transcript(write_transcript(lines)) == lines

    def test_non_monotone_rejected(self):
        lines = [
            TranscriptLine("b", 3.0, 4.0),
            TranscriptLine("a", 0.0, 1.0),
        ]
        with pytest.raises(SchemaError, match="monotone"):
            parse_transcript(write_transcript(lines))

    def test_end_before_start_rejected(self):
        with pytest.raises(SchemaError, match="end"):
            parse_transcript(write_transcript([TranscriptLine("a", 2.0, 1.0)]))


class TestCandidates:
    def test_round_trip(self):
        cands = [
            TranslationCandidate("花が咲くよ", -0.3),
            TranslationCandidate("はなのうた", -0.1),
        ]
        target, parsed = parse_candidates(write_candidates(6, cands))
        assert target == 6
        assert [(c.text, c.beam_score) for c in parsed] == [
            ("花が咲くよ", -0.3),
            ("はなのうた", -0.1),
        ]

    def test_empty_candidates_rejected(self):
        with pytest.raises(SchemaError, match="empty"):
            parse_candidates(write_candidates(3, []))

    def test_target_must_be_positive(self):
        document = write_candidates(1, [TranslationCandidate("ね", 0.0)])
        data = json.loads(document)
        data["target_syllables"] = 0
        with pytest.raises(SchemaError, match="target_syllables"):
            parse_candidates(json.dumps(data, ensure_ascii=False))

    def test_non_finite_score_rejected(self):
        document = '{"schema_version": "1", "target_syllables": 2, "candidates": [{"text": "a", "score": NaN}]}'
        with pytest.raises(SchemaError, match="finite"):
            parse_candidates(document)


class TestUstExport:
    def project_one_note(self, duration: float, deviation=()) -> SynthProject:
        syllable = Syllable.from_phonemes(parse_phonemes(["K", "AA1"]))
        note = SyllableNote(0.0, duration, syllable, 0, lyric="か")
        return SynthProject(
            notes=(note,), deviation=DeviationCurve(tuple(deviation))
        )

    def test_half_second_at_120_is_one_beat(self):
        text = export_ust(self.project_one_note(0.5), 120.0, 480)
        assert "Length=480" in text

    def test_quarter_second_is_half_beat(self):
        text = export_ust(self.project_one_note(0.25), 120.0, 480)
        assert "Length=240" in text

    def test_tick_error_within_one(self):
        rng = random.Random(13)
        for _ in range(300):
            duration = rng.randint(1, 400) / 100
            tempo = rng.choice([60.0, 90.0, 120.0, 140.5])
            ticks = duration_to_ticks(duration, tempo, 480)
            assert abs(ticks - duration * tempo / 60 * 480) <= 1.0

    def test_ticks_monotonic_in_duration(self):
        durations = sorted(random.Random(14).uniform(0.01, 3.0) for _ in range(100))
        ticks = [duration_to_ticks(d, 120.0, 480) for d in durations]
        assert ticks == sorted(ticks)

    def test_sub_tick_note_clamped_with_warning(self):
        with pytest.warns(ExportWarning):
            text = export_ust(self.project_one_note(0.0005), 120.0, 480)
        assert "Length=1" in text

    def test_pitch_points_in_cents(self):
        project = self.project_one_note(0.02, deviation=[(0.0, 1.0), (0.01, -0.5)])
        text = export_ust(project, 120.0, 480)
        assert "PBType=5" in text
        assert "Pitches=100,100,-50,-50,-50" in text

    def test_continuation_lyric_preserved(self):
        syllable = Syllable.from_phonemes(parse_phonemes(["K", "AA1"]))
        notes = (
            SyllableNote(0.0, 0.5, syllable, 0, lyric="か"),
            SyllableNote(0.5, 0.5, syllable, 1, lyric="+"),
        )
        text = export_ust(
            SynthProject(notes=notes, deviation=DeviationCurve(())), 120.0, 480
        )
        assert "Lyric=+" in text

    def test_gap_becomes_rest(self):
        syllable = Syllable.from_phonemes(parse_phonemes(["K", "AA1"]))
        notes = (
            SyllableNote(0.0, 0.5, syllable, 0, lyric="か"),
            SyllableNote(1.0, 0.5, syllable, 1, lyric="な"),
        )
        text = export_ust(
            SynthProject(notes=notes, deviation=DeviationCurve(())), 120.0, 480
        )
        assert "Lyric=R" in text

    def test_golden_fixture_byte_equal(self, fixtures_dir):
        project = parse_project(
            (fixtures_dir / "golden_project.json").read_text(encoding="utf-8")
        )
        text = export_ust(project, 120.0, 480)
        golden = (fixtures_dir / "golden_export.ust").read_text(encoding="utf-8")
        assert text == golden

    def test_bad_tempo_rejected(self):
        with pytest.raises(Exception, match="tempo"):
            export_ust(self.project_one_note(0.5), 0.0, 480)
