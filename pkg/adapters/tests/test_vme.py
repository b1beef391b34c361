"""The melody extraction adapter runs offline end to end."""

from sv2svt.interchange import validate_contour

from conftest import run_adapter, write_sine_wav


def test_sine_wave_contour(tmp_path, sine_wav):
    out = tmp_path / "contour.csv"
    proc = run_adapter("vme", str(sine_wav), str(out))
    assert proc.returncode == 0, proc.stderr
    frames = validate_contour(out.read_text(encoding="utf-8"))
    assert frames, "contour is empty"
    voiced = [f for f in frames if f.voiced]
    assert voiced, "no voiced frames detected on a clear tone"
    # steady 440 Hz tone: every voiced estimate lands within a few cents
    mid = voiced[len(voiced) // 3 : 2 * len(voiced) // 3]
    assert all(abs(f.f0_hz - 440.0) < 2.0 for f in mid)
    # leading silence stays unvoiced
    assert all(not f.voiced for f in frames if f.time_s < 0.15)


def test_low_tone_tracked(tmp_path):
    wav = write_sine_wav(tmp_path / "low.wav", frequency=110.0)
    out = tmp_path / "contour.csv"
    proc = run_adapter("vme", str(wav), str(out))
    assert proc.returncode == 0, proc.stderr
    frames = validate_contour(out.read_text(encoding="utf-8"))
    voiced = [f for f in frames if f.voiced]
    mid = voiced[len(voiced) // 3 : 2 * len(voiced) // 3]
    assert mid and all(abs(f.f0_hz - 110.0) < 1.0 for f in mid)


def test_silence_only_is_all_unvoiced(tmp_path):
    wav = write_sine_wav(tmp_path / "silent.wav", amplitude=0.0)
    out = tmp_path / "contour.csv"
    proc = run_adapter("vme", str(wav), str(out))
    assert proc.returncode == 0, proc.stderr
    frames = validate_contour(out.read_text(encoding="utf-8"))
    assert frames and all(not f.voiced for f in frames)


def test_corrupt_wav_fails_with_diagnostic(tmp_path):
    bad = tmp_path / "corrupt.wav"
    bad.write_bytes(b"not really a wav file")
    proc = run_adapter("vme", str(bad), str(tmp_path / "out.csv"))
    assert proc.returncode == 3
    assert "cannot decode" in proc.stderr
