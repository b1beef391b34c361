import json
import sys
from pathlib import Path

import pytest

from sv2svt.cli import main as cli_main
from sv2svt.errors import AdapterError, ConfigError
from sv2svt.pipeline import (
    StageCache,
    load_config,
    parse_config,
    run_pipeline,
    validate_config,
)

from conftest import write_stub_config


class TestConfigParsing:
    def test_missing_equals_reports_line(self, tmp_path):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("tempo_bpm = 120\nnonsense\n", tmp_path)

    def test_duplicate_key_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("tempo_bpm = 120\ntempo_bpm = 90\n", tmp_path)

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="mystery"):
            parse_config("mystery = 1\n", tmp_path)

    def test_comments_ignored(self, tmp_path):
        config = parse_config("# a comment\ntempo_bpm = 90 # trailing\n", tmp_path)
        assert config.tempo_bpm == 90.0

    def test_workdir_env_override(self, tmp_path):
        config_path = write_stub_config(tmp_path / "p.cfg", tmp_path / "work")
        config = load_config(config_path, env={"SV2SVT_WORKDIR": str(tmp_path / "elsewhere")})
        assert config.work_dir == (tmp_path / "elsewhere").resolve()

    def test_missing_adapter_rejected_at_validation(self, tmp_path):
        config = parse_config("tempo_bpm = 120\n", tmp_path)
        with pytest.raises(ConfigError, match="no adapter"):
            validate_config(config)

    def test_missing_placeholder_rejected(self, stub_config):
        config = stub_config()
        bad = config.adapters["translate"]
        from sv2svt.pipeline import StageAdapter

        config.adapters["translate"] = StageAdapter(
            "translate", bad.command[:-1], bad.timeout_s
        )
        with pytest.raises(ConfigError, match="target_syllables"):
            validate_config(config)

    def test_unresolvable_executable_rejected(self, stub_config):
        config = stub_config()
        from sv2svt.pipeline import StageAdapter

        config.adapters["vme"] = StageAdapter(
            "vme", ("no-such-binary-zz", "{input}", "{output}")
        )
        with pytest.raises(ConfigError, match="no-such-binary-zz"):
            validate_config(config)

    def test_language_pair_pinned(self, tmp_path):
        config = parse_config("target_language = fr\n", tmp_path)
        with pytest.raises(ConfigError, match="en.*ja|ja.*en"):
            validate_config(config)


class TestFullRun:
    def run_fixture(self, config, fixtures_dir):
        return run_pipeline(config, fixtures_dir / "performance.audio")

    def test_golden_project(self, stub_config, fixtures_dir):
        config = stub_config()
        project, report = self.run_fixture(config, fixtures_dir)
        produced = (config.work_dir / "project.json").read_bytes()
        golden = (fixtures_dir / "golden_project.json").read_bytes()
        assert produced == golden
        assert all(s.status == "run" for s in report.stages)

    def test_rerun_fully_cached_and_identical(self, stub_config, fixtures_dir):
        config = stub_config()
        self.run_fixture(config, fixtures_dir)
        first = (config.work_dir / "project.json").read_bytes()
        _, report = self.run_fixture(config, fixtures_dir)
        assert (config.work_dir / "project.json").read_bytes() == first
        assert all(s.status == "cached" for s in report.stages)

    @pytest.mark.parametrize("order", ["align-first", "vme-first"])
    def test_branch_order_permutations_identical(
        self, stub_config, fixtures_dir, order
    ):
        config = stub_config(branch_order=order, name=f"{order}.cfg")
        self.run_fixture(config, fixtures_dir)
        produced = (config.work_dir / "project.json").read_bytes()
        assert produced == (fixtures_dir / "golden_project.json").read_bytes()

    def test_flag_change_reruns_only_dependents(self, stub_config, fixtures_dir):
        config = stub_config()
        self.run_fixture(config, fixtures_dir)
        config.smoothing_window = 3
        _, report = self.run_fixture(config, fixtures_dir)
        status = {s.stage: s.status for s in report.stages}
        assert status["transcribe"] == "cached"
        assert status["vme"] == "cached"
        assert status["deviation"] == "run"  # smoothing participates in its key

    def test_unknown_audio_fails_as_adapter_error(self, stub_config, tmp_path):
        config = stub_config()
        unknown = tmp_path / "other.audio"
        unknown.write_bytes(b"different bytes")
        with pytest.raises(AdapterError, match="transcribe"):
            run_pipeline(config, unknown)

    def test_line_reports(self, stub_config, fixtures_dir):
        config = stub_config()
        _, report = self.run_fixture(config, fixtures_dir)
        assert [l.target_syllables for l in report.lines] == [6, 3]
        assert report.lines[0].chosen_text == "花が咲くよ"
        assert report.lines[0].deficit == 0
        assert report.lines[1].chosen_text == "ねこ"
        assert report.lines[1].deficit == 1
        assert not report.lines[1].fallback_used

    def test_missing_audio_is_config_error(self, stub_config, tmp_path):
        config = stub_config()
        with pytest.raises(ConfigError, match="audio"):
            run_pipeline(config, tmp_path / "nope.audio")


class TestRunStage:
    def test_single_stage_with_cache(self, stub_config, fixtures_dir):
        from sv2svt.pipeline import run_stage

        config = stub_config()
        audio = fixtures_dir / "performance.audio"
        output, report = run_stage(config, "transcribe", {"input": audio})
        assert report.status == "run"
        assert output.name == "transcript.json"
        _, report = run_stage(config, "transcribe", {"input": audio})
        assert report.status == "cached"

    def test_unknown_stage_rejected(self, stub_config):
        from sv2svt.pipeline import run_stage

        with pytest.raises(ConfigError, match="unknown stage"):
            run_stage(stub_config(), "mystery", {})


class TestStageCache:
    def test_lookup_rejects_modified_output(self, tmp_path):
        cache = StageCache(tmp_path)
        out = tmp_path / "x.txt"
        out.write_text("original", encoding="utf-8")
        key = StageCache.key("stage", "cmd", ["h"], {})
        cache.store(key, out)
        assert cache.lookup(key) == out
        out.write_text("tampered", encoding="utf-8")
        assert cache.lookup(key) is None

    def test_key_depends_on_inputs_and_params(self):
        base = StageCache.key("s", "cmd", ["a"], {"flag": 1})
        assert base != StageCache.key("s", "cmd", ["b"], {"flag": 1})
        assert base != StageCache.key("s", "cmd", ["a"], {"flag": 2})
        assert base != StageCache.key("s", "other", ["a"], {"flag": 1})
        assert base == StageCache.key("s", "cmd", ["a"], {"flag": 1})


class TestCli:
    def test_validate_config_ok(self, tmp_path, capsys):
        config_path = write_stub_config(tmp_path / "p.cfg", tmp_path / "work")
        assert cli_main(["validate-config", "--config", str(config_path)]) == 0
        assert "config ok" in capsys.readouterr().out

    def test_validate_config_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("tempo_bpm = 120\n", encoding="utf-8")
        assert cli_main(["validate-config", "--config", str(bad)]) == 2

    def test_run_exit_codes(self, tmp_path, fixtures_dir):
        config_path = write_stub_config(tmp_path / "p.cfg", tmp_path / "work")
        audio = fixtures_dir / "performance.audio"
        assert cli_main(["run", "--config", str(config_path), "--audio", str(audio)]) == 0
        other = tmp_path / "other.audio"
        other.write_bytes(b"unseen")
        assert cli_main(["run", "--config", str(config_path), "--audio", str(other)]) == 3

    def test_syllabify_blueberry(self, capsys):
        assert cli_main(["syllabify", "blueberry"]) == 0
        out = capsys.readouterr().out
        assert "BLUW BEH RIY" in out
        assert "syllables: 3" in out

    def test_syllabify_oov_exit_4(self, capsys):
        assert cli_main(["syllabify", "zzglorp"]) == 4

    def test_notes_command(self, tmp_path, capsys):
        labels = tmp_path / "labels.tsv"
        labels.write_text(
            "0.0\t0.1\tK\t0\n0.1\t0.3\tAE1\t0\n0.3\t0.4\tT\t0\n", encoding="utf-8"
        )
        assert cli_main(["notes", "--labels", str(labels)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["notes"][0]["onset_s"] == "0.000000"
        assert data["notes"][0]["duration_s"] == "0.400000"

    def test_contour_command(self, tmp_path, capsys):
        contour = tmp_path / "contour.csv"
        contour.write_text("0.00,440.0\n0.01,0\n", encoding="utf-8")
        assert cli_main(["contour", "--contour", str(contour)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["deviation"] == [{"semitones": "9.000000", "time_s": "0.000000"}]

    def test_fit_lyrics_command(self, tmp_path, capsys):
        candidates = tmp_path / "candidates.json"
        candidates.write_text(
            json.dumps(
                {
                    "schema_version": "1",
                    "target_syllables": 2,
                    "candidates": [{"text": "はな", "score": -0.5}],
                },
                ensure_ascii=False,
            ),
            encoding="utf-8",
        )
        assert cli_main(["fit-lyrics", "--candidates", str(candidates)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["chosen_text"] == "はな" and data["deficit"] == 0

    def test_export_command(self, tmp_path, fixtures_dir, capsys):
        out = tmp_path / "out.ust"
        assert (
            cli_main(
                [
                    "export",
                    "--project",
                    str(fixtures_dir / "golden_project.json"),
                    "--ust",
                    str(out),
                ]
            )
            == 0
        )
        golden = (fixtures_dir / "golden_export.ust").read_bytes()
        assert out.read_bytes() == golden

    def test_eval_stats_command(self, tmp_path, capsys):
        scores = tmp_path / "scores.csv"
        rows = ["subject,system,question,score"]
        for q in ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6"):
            for s in range(3):
                rows.append(f"s{s},baseline,{q},2")
                rows.append(f"s{s},finetuned,{q},2")
        scores.write_text("\n".join(rows) + "\n", encoding="utf-8")
        json_out = tmp_path / "report.json"
        assert (
            cli_main(
                ["eval-stats", "--scores", str(scores), "--json", str(json_out)]
            )
            == 0
        )
        out = capsys.readouterr().out
        assert "1.000" in out  # identical systems -> p = 1.0
        assert json.loads(json_out.read_text(encoding="utf-8"))["questions"]


class TestStubProtocol:
    def test_segment_stub_round_trip(self):
        import subprocess

        proc = subprocess.run(
            [sys.executable, "-m", "sv2svt.stubs", "segment"],
            input="花が咲くよ\n",
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == "花 が 咲 くよ\n"

    def test_readings_stub_unknown_word_fails(self, tmp_path):
        import subprocess

        words = tmp_path / "words.txt"
        words.write_text("謎\n", encoding="utf-8")
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "sv2svt.stubs",
                "readings",
                str(words),
                str(tmp_path / "out.tsv"),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 1
        assert "謎" in proc.stderr
